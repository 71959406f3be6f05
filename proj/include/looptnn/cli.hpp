#pragma once

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "looptnn/json_io.hpp"

namespace looptnn {
namespace cli {

using io::json;

namespace detail4 {

inline json load_json(const std::string& spec) {
    std::string text;
    if (!spec.empty() && (spec[0] == '{' || spec[0] == '[')) {
        text = spec;
    } else {
        std::ifstream f(spec);
        if (!f) fail("IO", "cannot open input: " + spec);
        std::stringstream ss;
        ss << f.rdbuf();
        text = ss.str();
    }
    try {
        return json::parse(text);
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("JSON parse error: ") + e.what());
    }
}

inline std::vector<long long> ll_list(const json& j) {
    std::vector<long long> out;
    for (const auto& v : j) out.push_back(v.get<long long>());
    return out;
}

inline whirl_curl::ParamList tuple_list(const json& j) {
    whirl_curl::ParamList list;
    if (j.is_object() && j.contains("atoms")) {
        for (const auto& t : positivity::curl_tuples_of(io::word_from_json(j))) list.push_back(t);
        return list;
    }
    for (const auto& t : j) list.push_back(io::tuple_from_json(t));
    return list;
}

inline json eps_json(const positivity::EpsilonResult& r) {
    json out;
    out["mode"] = r.mode == positivity::EpsilonResult::Mode::EXACT_FROM_WORD ? "EXACT_FROM_WORD"
                                                                             : "ESTIMATED";
    json vals = json::array();
    for (const auto& v : r.values) vals.push_back(io::rat_to_json(v));
    out["values"] = vals;
    json ivs = json::array();
    for (const auto& [lo, hi] : r.intervals)
        ivs.push_back(json{{"lo", io::rat_to_json(lo)}, {"hi", io::rat_to_json(hi)}});
    out["intervals"] = ivs;
    json cands = json::array();
    for (const auto& c : r.candidates) cands.push_back(io::to_json(c));
    out["candidates"] = cands;
    out["converged"] = r.converged;
    return out;
}

} // namespace detail4

// The whole CLI as a library function: parses argv (without the program
// name), writes a single JSON document, and returns the process exit code
// (0 ok, 1 malformed input, 2 domain error).
inline int run(std::vector<std::string> argv, std::ostream& out_stream, std::ostream& err_stream) {
    CLI::App app{"exact computations in the totally nonnegative loop group"};
    app.require_subcommand(1);

    std::vector<std::string> in;
    std::string out_path, a_str, b_str, rows_str, cols_str, I_str, kind, params_str, eps_str,
        word_str, shape_str, tol_str = "1/1000000";
    long long hmax = 40, window = 16, budget = 400000, i_base = 0;
    int kmax = 3, k_arg = 0, threads = 1, trunc = -1, approx_rotor = -1, n_arg = 0;
    bool mirror = false, inverse = false;

    auto add_common = [&](CLI::App* s) {
        s->add_option("--in", in, "input file or inline JSON (repeatable)");
        s->add_option("--out", out_path, "output file (default stdout)");
        s->add_option("--budget", budget, "enumeration budget");
        s->add_option("--threads", threads, "worker threads for internal enumeration");
        s->add_option("--tolerance", tol_str, "tolerance as an exact rational p/q");
        return s;
    };

    auto* c_fold = add_common(app.add_subcommand("fold", "band matrix -> Laurent matrix"));
    c_fold->add_option("--trunc", trunc, "truncation order for non-exact matrices");
    auto* c_unfold = add_common(app.add_subcommand("unfold", "Laurent matrix -> band matrix"));
    c_unfold->add_option("--window", window, "highest stored offset");
    add_common(app.add_subcommand("mul", "band matrix product"));
    auto* c_minor = add_common(app.add_subcommand("minor", "exact minor Delta_{I,J}"));
    c_minor->add_option("--rows", rows_str, "row set, e.g. [1,2]")->required();
    c_minor->add_option("--cols", cols_str, "column set")->required();
    add_common(app.add_subcommand("tnn", "TNN verdict with certificate or witness"));
    auto* c_tp = add_common(app.add_subcommand("tp", "total positivity scan on a window"));
    c_tp->add_option("--kmax", kmax, "largest minor size");
    c_tp->add_option("--window", window, "index window");
    auto* c_eps = add_common(app.add_subcommand("epsilon", "epsilon/mu sequences and radius"));
    c_eps->add_option("--window", window, "evaluation window for estimates");
    add_common(app.add_subcommand("factor", "constructive TNN factorization"));
    add_common(app.add_subcommand("reduce", "X = F S^k Y reduction"));
    add_common(app.add_subcommand("asw-sort", "sort curl tuples by decreasing product"));
    auto* c_astep = add_common(app.add_subcommand("asw-step", "one ASW extraction step"));
    c_astep->add_option("--epsilon", eps_str, "tuple for window mode");
    add_common(app.add_subcommand("whirl-extract", "extract the rightmost whirl factor"));
    auto* c_eta = add_common(app.add_subcommand("eta", "whirl commutation map"));
    c_eta->add_option("--a", a_str, "first tuple")->required();
    c_eta->add_option("--b", b_str, "second tuple")->required();
    auto* c_theta = add_common(app.add_subcommand("theta", "whirl-past-curl commutation map"));
    c_theta->add_option("--a", a_str, "first tuple")->required();
    c_theta->add_option("--b", b_str, "second tuple")->required();
    c_theta->add_flag("--inverse", inverse, "apply the inverse map");
    auto* c_abs = add_common(app.add_subcommand("absorb", "pass a Chevalley e through tuples"));
    c_abs->add_option("--kind", kind, "whirl or curl")->required();
    c_abs->add_option("--k", k_arg, "Chevalley index")->required();
    c_abs->add_option("--a", a_str, "Chevalley parameter")->required();
    auto* c_schur = add_common(app.add_subcommand("schur", "loop Schur evaluation"));
    c_schur->add_option("--params", params_str, "parameter tuples")->required();
    c_schur->add_flag("--mirror", mirror, "use mirror residues");
    auto* c_rl = add_common(app.add_subcommand("ratio-limit", "minor ratio sequence and target"));
    c_rl->add_option("--I", I_str, "row set I")->required();
    c_rl->add_option("--i", i_base, "base index i")->required();
    c_rl->add_option("--k", k_arg, "minor size k")->required();
    c_rl->add_option("--hmax", hmax, "largest column shift");
    auto* c_rec = add_common(app.add_subcommand("recover", "curl parameter recovery"));
    c_rec->add_option("--kmax", kmax, "number of curls to recover");
    c_rec->add_option("--hmax", hmax, "largest column shift");
    auto* c_neval = add_common(app.add_subcommand("net-eval", "evaluate a cylindric network"));
    c_neval->add_option("--window", window, "window guard");
    auto* c_nminor = add_common(app.add_subcommand("net-minor", "cylindric Lindstrom minor"));
    c_nminor->add_option("--rows", rows_str, "row set")->required();
    c_nminor->add_option("--cols", cols_str, "column set")->required();
    auto* c_ndet = add_common(app.add_subcommand("net-det", "folded determinant via families"));
    c_ndet->add_option("--kmax", kmax, "largest |t-degree| scanned (-1 = auto)");
    auto* c_nbuild = add_common(app.add_subcommand("net-build", "build a block or word network"));
    c_nbuild->add_option("--word", word_str, "generator word JSON");
    c_nbuild->add_option("--kind", kind, "block kind: whirl|e|f|shift|downshift|torus");
    c_nbuild->add_option("--params", params_str, "block parameters");
    c_nbuild->add_option("--n", n_arg, "period");
    c_nbuild->add_option("--k", k_arg, "Chevalley index for e/f blocks");

    std::vector<const char*> cargv;
    cargv.push_back("looptnn");
    for (const auto& s : argv) cargv.push_back(s.c_str());

    try {
        app.parse(static_cast<int>(cargv.size()), cargv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) { // --help
            err_stream << app.help();
            return 0;
        }
        err_stream << e.what() << "\n";
        return 1;
    }

    auto emit = [&](const json& j) {
        std::string text = j.dump(2) + "\n";
        if (out_path.empty()) out_stream << text;
        else {
            std::ofstream f(out_path);
            f << text;
        }
        return 0;
    };

    try {
        const std::string sub = app.get_subcommands().front()->get_name();
        Rat tolerance = parse_rat(tol_str);
        auto need_in = [&](size_t count) {
            if (in.size() != count)
                fail("BAD_INPUT", sub + " needs exactly " + std::to_string(count) + " --in");
        };

        if (sub == "fold") {
            need_in(1);
            auto x = io::matrix_from_json(detail4::load_json(in[0]));
            auto a = trunc >= 0 ? fold(x, trunc) : fold(x);
            return emit(io::to_json(a));
        }
        if (sub == "unfold") {
            need_in(1);
            auto a = io::laurent_matrix_from_json(detail4::load_json(in[0]));
            return emit(io::to_json(unfold(a, static_cast<int>(window))));
        }
        if (sub == "mul") {
            need_in(2);
            auto x = io::matrix_from_json(detail4::load_json(in[0]));
            auto y = io::matrix_from_json(detail4::load_json(in[1]));
            return emit(io::to_json(multiply(x, y)));
        }
        if (sub == "minor") {
            need_in(1);
            auto x = io::matrix_from_json(detail4::load_json(in[0]));
            Rat v = minor_det(x, detail4::ll_list(detail4::load_json(rows_str)),
                              detail4::ll_list(detail4::load_json(cols_str)));
            return emit(json{{"schema", io::kSchema}, {"value", io::rat_to_json(v)}});
        }
        if (sub == "tnn") {
            need_in(1);
            auto x = io::matrix_from_json(detail4::load_json(in[0]));
            return emit(io::to_json(positivity::certify_tnn(x)));
        }
        if (sub == "tp") {
            need_in(1);
            auto x = io::matrix_from_json(detail4::load_json(in[0]));
            auto v = positivity::is_tp_window(x, kmax, static_cast<int>(window), budget);
            json outj{{"schema", io::kSchema},
                      {"status", v.refuted ? "REFUTED_TP" : "NO_VIOLATION_UP_TO_WINDOW"}};
            outj["witness"] = v.witness ? io::to_json(*v.witness) : json(nullptr);
            outj["solid_witness"] = v.solid_witness ? io::to_json(*v.solid_witness) : json(nullptr);
            return emit(outj);
        }
        if (sub == "epsilon") {
            need_in(1);
            json j = detail4::load_json(in[0]);
            json outj{{"schema", io::kSchema}};
            if (j.is_object() && j.contains("atoms")) {
                auto w = io::word_from_json(j);
                auto eps = positivity::epsilon_sequence(w, static_cast<int>(window));
                auto mu = positivity::mu_sequence(w, static_cast<int>(window));
                outj["epsilon"] = detail4::eps_json(eps);
                outj["mu"] = detail4::eps_json(mu);
                outj["radius"] = io::rat_to_json(positivity::radius(w));
            } else {
                auto x = io::matrix_from_json(j);
                outj["epsilon"] = detail4::eps_json(positivity::epsilon_estimate(x, tolerance));
                outj["mu"] = detail4::eps_json(positivity::mu_estimate(x, tolerance));
                outj["radius"] = json(nullptr);
            }
            return emit(outj);
        }
        if (sub == "factor") {
            need_in(1);
            auto x = io::matrix_from_json(detail4::load_json(in[0]));
            auto v = positivity::certify_tnn(x);
            if (v.status != positivity::TnnStatus::CERTIFIED) {
                std::string detail = "matrix is not totally nonnegative";
                if (v.witness)
                    detail += "; negative minor value " + rat_str(v.witness->value);
                fail("NOT_TNN", detail);
            }
            return emit(io::to_json(*v.certificate));
        }
        if (sub == "reduce") {
            need_in(1);
            auto x = io::matrix_from_json(detail4::load_json(in[0]));
            auto r = factorization::reduce_lower(x);
            return emit(json{{"schema", io::kSchema},
                             {"f_word", io::to_json(r.f_word)},
                             {"k", r.k},
                             {"y", io::to_json(r.y)}});
        }
        if (sub == "asw-sort") {
            need_in(1);
            auto list = detail4::tuple_list(detail4::load_json(in[0]));
            auto sorted = factorization::asw_sort(list);
            json arr = json::array();
            for (const auto& t : sorted) arr.push_back(io::to_json(t));
            return emit(json{{"schema", io::kSchema}, {"tuples", arr}});
        }
        if (sub == "asw-step") {
            need_in(1);
            json j = detail4::load_json(in[0]);
            if (j.is_object() && j.contains("atoms")) {
                auto step = factorization::asw_step(io::word_from_json(j));
                return emit(json{{"schema", io::kSchema},
                                 {"epsilon", io::to_json(step.eps)},
                                 {"residual", io::to_json(step.residual)}});
            }
            if (eps_str.empty()) fail("BAD_INPUT", "matrix mode needs --epsilon");
            auto x = io::matrix_from_json(j);
            auto eps = io::tuple_from_json(detail4::load_json(eps_str));
            return emit(json{{"schema", io::kSchema},
                             {"x_prime", io::to_json(factorization::asw_step_window(x, eps))}});
        }
        if (sub == "whirl-extract") {
            need_in(1);
            auto x = io::matrix_from_json(detail4::load_json(in[0]));
            auto we = factorization::whirl_extract(x);
            return emit(json{{"schema", io::kSchema},
                             {"tuple", io::to_json(we.a)},
                             {"y", io::to_json(we.y)},
                             {"exact", we.exact}});
        }
        if (sub == "eta" || sub == "theta") {
            auto a = io::tuple_from_json(detail4::load_json(a_str));
            auto b = io::tuple_from_json(detail4::load_json(b_str));
            std::pair<ParamTuple, ParamTuple> r;
            if (sub == "eta") r = whirl_curl::eta(a, b);
            else r = inverse ? whirl_curl::theta_inverse(a, b) : whirl_curl::theta(a, b);
            json bp = json::array(), ap = json::array();
            for (const auto& v : r.first.v) bp.push_back(io::rat_to_json(v));
            for (const auto& v : r.second.v) ap.push_back(io::rat_to_json(v));
            return emit(json{{"schema", io::kSchema}, {"b_prime", bp}, {"a_prime", ap}});
        }
        if (sub == "absorb") {
            need_in(1);
            auto list = detail4::tuple_list(detail4::load_json(in[0]));
            auto kd = kind == "whirl" ? whirl_curl::TupleKind::Whirl
                                      : whirl_curl::TupleKind::Curl;
            if (kind != "whirl" && kind != "curl") fail("BAD_INPUT", "--kind must be whirl or curl");
            auto r = whirl_curl::absorb_chevalley(kd, k_arg, parse_rat(a_str), list);
            json arr = json::array(), steps = json::array();
            for (const auto& t : r.tuples) arr.push_back(io::to_json(t));
            for (const auto& s : r.steps)
                steps.push_back(json{{"k", s.k}, {"a", io::rat_to_json(s.a)}});
            return emit(json{{"schema", io::kSchema},
                             {"tuples", arr},
                             {"k", r.k},
                             {"a", io::rat_to_json(r.a)},
                             {"steps", steps}});
        }
        if (sub == "schur") {
            need_in(1);
            auto shape = io::shape_from_json(detail4::load_json(in[0]));
            auto params = detail4::tuple_list(detail4::load_json(params_str));
            Rat v = lsym::loop_schur_eval(shape, params, mirror);
            return emit(json{{"schema", io::kSchema}, {"value", io::rat_to_json(v)}});
        }
        if (sub == "ratio-limit") {
            need_in(1);
            auto params = factorization::asw_sort(detail4::tuple_list(detail4::load_json(in[0])));
            auto rl = lsym::minor_ratio_limit(params, detail4::ll_list(detail4::load_json(I_str)),
                                              i_base, k_arg, hmax);
            json ratios = json::array(), hs = json::array();
            for (const auto& r : rl.ratios) ratios.push_back(io::rat_to_json(r));
            for (auto h : rl.hs) hs.push_back(h);
            return emit(json{{"schema", io::kSchema},
                             {"ratios", ratios},
                             {"hs", hs},
                             {"target", io::rat_to_json(rl.target)}});
        }
        if (sub == "recover") {
            need_in(1);
            auto params = factorization::asw_sort(detail4::tuple_list(detail4::load_json(in[0])));
            auto r = lsym::recover_curl_params(params, std::min<int>(kmax, params.size()), hmax,
                                               tolerance);
            json arr = json::array();
            for (const auto& t : r.params) arr.push_back(io::to_json(t));
            return emit(json{{"schema", io::kSchema},
                             {"params", arr},
                             {"converged", r.converged},
                             {"max_step", io::rat_to_json(r.max_step)}});
        }
        if (sub == "net-eval") {
            need_in(1);
            auto net = io::network_from_json(detail4::load_json(in[0]));
            return emit(io::to_json(cylnet::network_eval(net, static_cast<int>(window))));
        }
        if (sub == "net-minor") {
            need_in(1);
            auto net = io::network_from_json(detail4::load_json(in[0]));
            Rat v = cylnet::lindstrom_minor(net, detail4::ll_list(detail4::load_json(rows_str)),
                                            detail4::ll_list(detail4::load_json(cols_str)), budget);
            return emit(json{{"schema", io::kSchema}, {"value", io::rat_to_json(v)}});
        }
        if (sub == "net-det") {
            need_in(1);
            auto net = io::network_from_json(detail4::load_json(in[0]));
            auto det = cylnet::folded_det_families(net, kmax < 0 ? -1 : kmax, budget);
            return emit(io::to_json(det));
        }
        if (sub == "net-build") {
            cylnet::CylNetwork net;
            if (!word_str.empty()) {
                net = cylnet::network_from_word(io::word_from_json(detail4::load_json(word_str)));
            } else {
                if (n_arg <= 0) fail("BAD_INPUT", "net-build needs --word or --kind with --n");
                std::vector<Rat> ps;
                if (!params_str.empty())
                    for (const auto& v : detail4::load_json(params_str))
                        ps.push_back(io::rat_from_json(v));
                net = cylnet::build_block(kind, ps, n_arg, k_arg);
            }
            return emit(io::to_json(net));
        }
        fail("BAD_INPUT", "unknown subcommand");
    } catch (const std::invalid_argument& e) {
        emit(json{{"error", {{"code", "PARSE"}, {"detail", e.what()}}}});
        return 1;
    } catch (const domain_error& e) {
        emit(json{{"error", {{"code", e.code()}, {"detail", e.what()}}}});
        return 2;
    } catch (const json::exception& e) {
        emit(json{{"error", {{"code", "PARSE"}, {"detail", e.what()}}}});
        return 1;
    }
    return 0;
}

} // namespace cli
} // namespace looptnn
