#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <memory>

#include <fmt/chrono.h>
#include <fmt/format.h>

#include <ddenorm/continuation.hpp>
#include <ddenorm/integrate.hpp>
#include <ddenorm/nmfm.hpp>
#include <ddenorm/points.hpp>
#include <ddenorm/predictors.hpp>
#include <ddenorm/spectrum.hpp>

namespace ddenorm::cli {

namespace {

json make_metadata(const RunContext& ctx, const std::string& model_name) {
    return json{{"tool", "ddenorm"},
                {"version", kToolVersion},
                {"command", ctx.command},
                {"model", model_name},
                {"seed", ctx.seed},
                {"timestamp", fmt::format("{:%FT%TZ}",
                                          fmt::gmtime(std::chrono::system_clock::
                                                          to_time_t(
                                                              std::chrono::
                                                                  system_clock::
                                                                      now())))}};
}

void log(const RunContext& ctx, const std::string& msg) {
    if (ctx.verbose) fmt::print(stderr, "ddenorm: {}\n", msg);
}

const json& require_field(const json& obj, const std::string& key,
                          const std::string& where) {
    const auto it = obj.find(key);
    if (it == obj.end())
        throw InvalidInput(
            fmt::format("config: missing required field '{}' in {}", key,
                        where));
    return *it;
}

std::string require_model_name(const json& config) {
    return require_field(config, "model", "top level").get<std::string>();
}

int param_index(const DelayModel& model, const std::string& name) {
    const auto it = std::find(model.param_names.begin(),
                              model.param_names.end(), name);
    if (it == model.param_names.end())
        throw InvalidInput(fmt::format(
            "config: model '{}' has no parameter named '{}'", model.name,
            name));
    return static_cast<int>(it - model.param_names.begin());
}

Vec parse_alpha(const DelayModel& model, const json& config) {
    const json& p = require_field(config, "parameters", "top level");
    if (p.is_array()) {
        Vec a = vec_from_json(p);
        if (a.size() != model.p)
            throw InvalidInput(fmt::format(
                "config: 'parameters' must have {} entries for model '{}'",
                model.p, model.name));
        return a;
    }
    if (!p.is_object())
        throw InvalidInput("config: 'parameters' must be an array or an "
                           "object keyed by parameter name");
    Vec a = Vec::Zero(model.p);
    std::vector<bool> seen(static_cast<size_t>(model.p), false);
    for (const auto& [key, value] : p.items()) {
        const int i = param_index(model, key);
        if (!value.is_number())
            throw InvalidInput(
                fmt::format("config: parameter '{}' must be a number", key));
        a(i) = value.get<double>();
        seen[static_cast<size_t>(i)] = true;
    }
    for (int i = 0; i < model.p; ++i)
        if (!seen[static_cast<size_t>(i)])
            throw InvalidInput(fmt::format(
                "config: parameter '{}' missing from 'parameters'",
                model.param_names[static_cast<size_t>(i)]));
    return a;
}

std::array<int, 2> parse_unfolding(const DelayModel& model,
                                   const json& config) {
    const json& u = require_field(config, "unfolding", "top level");
    if (!u.is_array() || u.size() != 2)
        throw InvalidInput(
            "config: 'unfolding' must list exactly 2 parameter names");
    std::array<int, 2> idx{param_index(model, u[0].get<std::string>()),
                           param_index(model, u[1].get<std::string>())};
    if (idx[0] == idx[1])
        throw InvalidInput("config: 'unfolding' parameters must be distinct");
    return idx;
}

json param_names_json(const DelayModel& model) {
    json a = json::array();
    for (const auto& name : model.param_names) a.push_back(name);
    return a;
}

double number_or(const json& obj, const std::string& key, double dflt) {
    const auto it = obj.find(key);
    if (it == obj.end()) return dflt;
    if (!it->is_number())
        throw InvalidInput(fmt::format("config: '{}' must be a number", key));
    return it->get<double>();
}

// ---------------------------------------------------------------------------
// Shared analyze pipeline: correct, scan the spectrum, classify.
// ---------------------------------------------------------------------------
struct AnalyzeResult {
    DelayModel model;
    Vec alpha;
    std::array<int, 2> unfolding{};
    Equilibrium eq;
    std::vector<Eigenpair> eigs;
    CodimTwoPoint pt;
};

AnalyzeResult run_analyze(const RunContext& ctx) {
    AnalyzeResult r;
    r.model = make_model(require_model_name(ctx.config));
    r.alpha = parse_alpha(r.model, ctx.config);
    r.unfolding = parse_unfolding(r.model, ctx.config);

    const json block = ctx.config.value("analyze", json::object());
    Vec x0 = Vec::Zero(r.model.n);
    if (block.contains("x")) x0 = vec_from_json(block["x"]);
    if (x0.size() != r.model.n)
        throw InvalidInput("config: analyze.x has the wrong dimension");

    r.eq = correct_equilibrium(r.model, r.alpha, x0);
    log(ctx, fmt::format("equilibrium corrected, residual {:.3e}",
                         r.eq.residual));

    const double l1_tol = number_or(block, "l1_tol", 1e-6);

    // Optional codim-1 correction: pins the point onto the Hopf/fold
    // manifold by freeing one parameter, so that configs may carry rounded
    // parameter values.
    if (const auto it = block.find("correct"); it != block.end()) {
        const std::string type =
            require_field(*it, "type", "analyze.correct").get<std::string>();
        const int free_param = param_index(
            r.model, require_field(*it, "free_param", "analyze.correct")
                         .get<std::string>());
        if (type == "hopf") {
            const double omega =
                require_field(*it, "omega", "analyze.correct").get<double>();
            const HopfPoint hp = correct_hopf(
                r.model, make_hopf_guess(r.model, r.alpha, r.eq.x, omega),
                free_param);
            r.alpha = hp.eq.alpha;
            r.eq = hp.eq;
            r.pt = classify_codim2(r.model, hp, l1_tol);
        } else if (type == "fold") {
            FoldPoint g;
            g.eq = r.eq;
            const FoldPoint fp = correct_fold(r.model, g, free_param);
            r.alpha = fp.eq.alpha;
            r.eq = fp.eq;
            r.pt = classify_codim2(r.model, fp, l1_tol);
        } else {
            throw InvalidInput(
                "config: analyze.correct.type must be 'hopf' or 'fold'");
        }
        log(ctx, fmt::format("codim-1 correction moved {} to {:.12g}",
                             r.model.param_names[static_cast<size_t>(
                                 free_param)],
                             r.alpha(free_param)));
    } else {
        r.pt = classify_codim2(r.model, r.eq, l1_tol);
    }

    const int eig_count =
        static_cast<int>(number_or(block, "eig_count", 6.0));
    const CharLinearization lin = linearize(r.model, r.eq.x, r.alpha);
    r.eigs = rightmost(lin, eig_count);
    log(ctx, fmt::format("classified as {}", codim2_kind_name(r.pt.kind)));
    return r;
}

json point_json(const RunContext& ctx, const AnalyzeResult& r) {
    json doc;
    doc["metadata"] = make_metadata(ctx, r.model.name);
    doc["model"] = r.model.name;
    doc["kind"] = codim2_kind_name(r.pt.kind);
    doc["alpha"] = to_json(r.alpha);
    doc["parameter_names"] = param_names_json(r.model);
    doc["x"] = to_json(r.eq.x);
    doc["residual"] = r.eq.residual;
    doc["unfolding"] =
        json::array({r.model.param_names[static_cast<size_t>(r.unfolding[0])],
                     r.model.param_names[static_cast<size_t>(r.unfolding[1])]});
    json eigs = json::array();
    for (const auto& e : r.eigs) eigs.push_back(to_json(e.lambda));
    doc["eigenvalues"] = eigs;
    switch (r.pt.kind) {
        case Codim2Kind::genh:
            doc["omega0"] = r.pt.omega0;
            doc["L1"] = r.pt.L1;
            break;
        case Codim2Kind::zeho:
        case Codim2Kind::thopf:
            doc["omega0"] = r.pt.omega0;
            break;
        case Codim2Kind::hoho:
            doc["omega1"] = r.pt.omega1;
            doc["omega2"] = r.pt.omega2;
            break;
    }
    return doc;
}

json coefficients_json(const GenHData& d) {
    return json{{"c1", to_json(d.c1)},
                {"c2", to_json(d.c2)},
                {"L1", d.L1},
                {"L2", d.L2},
                {"gamma110", to_json(d.gamma110)},
                {"gamma101", to_json(d.gamma101)},
                {"gamma210", to_json(d.gamma210)},
                {"gamma201", to_json(d.gamma201)},
                {"omega0", d.omega0},
                {"omega10", d.omega10},
                {"omega01", d.omega01},
                {"K10", to_json(Eigen::Vector2d(d.Rinv.col(0)))},
                {"K01", to_json(Eigen::Vector2d(d.Rinv.col(1)))}};
}

json coefficients_json(const ZeHoData& d) {
    return json{{"g200", d.g200},
                {"g110", to_json(d.g110)},
                {"g011", d.g011},
                {"g300", d.g300},
                {"g111", d.g111},
                {"g210", to_json(d.g210)},
                {"g021", to_json(d.g021)},
                {"theta", d.theta0},
                {"e", d.e0},
                {"s", d.s_sign},
                {"omega0", d.omega0},
                {"omega1", d.omega1},
                {"omega2", d.omega2},
                {"K10", to_json(d.K10)},
                {"K01", to_json(d.K01)}};
}

json coefficients_json(const HoHoData& d) {
    return json{{"g2100", to_json(d.g2100)},
                {"g1011", to_json(d.g1011)},
                {"g1110", to_json(d.g1110)},
                {"g0021", to_json(d.g0021)},
                {"theta", d.theta0},
                {"delta", d.delta0},
                {"b11", d.b11},
                {"b12", d.b12},
                {"b21", d.b21},
                {"b22", d.b22},
                {"omega1", d.omega1},
                {"omega2", d.omega2},
                {"K10", to_json(d.K10)},
                {"K01", to_json(d.K01)}};
}

json normal_form_coefficients(const DelayModel& model, const CodimTwoPoint& pt,
                              std::array<int, 2> unfolding) {
    switch (pt.kind) {
        case Codim2Kind::genh:
            return coefficients_json(genh_normal_form(model, pt, unfolding));
        case Codim2Kind::zeho:
        case Codim2Kind::thopf:
            return coefficients_json(zeho_normal_form(model, pt, unfolding));
        case Codim2Kind::hoho:
            return coefficients_json(hoho_normal_form(model, pt, unfolding));
    }
    throw InvalidInput("unreachable: unknown codim-2 kind");
}

std::vector<double> parse_eps_grid(const json& block) {
    const auto it = block.find("eps_grid");
    if (it == block.end()) return default_eps_grid();
    if (it->is_array()) {
        std::vector<double> eps;
        for (const auto& v : *it) {
            if (!v.is_number() || v.get<double>() <= 0.0)
                throw InvalidInput("config: eps_grid entries must be positive "
                                   "numbers");
            eps.push_back(v.get<double>());
        }
        if (eps.empty())
            throw InvalidInput("config: eps_grid must not be empty");
        return eps;
    }
    if (!it->is_object())
        throw InvalidInput("config: eps_grid must be an array or an object "
                           "{lo, hi, per_decade}");
    const double lo = number_or(*it, "lo", 1e-4);
    const double hi = number_or(*it, "hi", 1e-1);
    const double per_decade = number_or(*it, "per_decade", 20.0);
    if (lo <= 0.0 || hi < lo || per_decade < 1.0)
        throw InvalidInput("config: eps_grid requires 0 < lo <= hi and "
                           "per_decade >= 1");
    std::vector<double> eps;
    const double step = std::pow(10.0, 1.0 / per_decade);
    for (double v = lo; v < hi * (1.0 + 1e-12); v *= step) eps.push_back(v);
    return eps;
}

} // namespace

void cmd_models(const RunContext& ctx) {
    json doc;
    doc["metadata"] = make_metadata(ctx, "");
    json models = json::array();
    for (const auto& name : builtin_model_names()) {
        const DelayModel m = make_model(name);
        models.push_back({{"name", m.name},
                          {"state_dimension", m.n},
                          {"parameters", param_names_json(m)},
                          {"fixed_equilibrium", m.fixed_equilibrium},
                          {"time_rescaled", m.time_rescaled}});
    }
    doc["models"] = models;
    write_validated_json(ctx.out_dir / "models.json", doc, "models");
    fmt::print("{}\n", doc["models"].dump(2));
}

void cmd_analyze(const RunContext& ctx) {
    const AnalyzeResult r = run_analyze(ctx);
    write_validated_json(ctx.out_dir / "point.json", point_json(ctx, r),
                         "point");

    json nm;
    nm["metadata"] = make_metadata(ctx, r.model.name);
    nm["kind"] = codim2_kind_name(r.pt.kind);
    nm["unfolding"] =
        json::array({r.model.param_names[static_cast<size_t>(r.unfolding[0])],
                     r.model.param_names[static_cast<size_t>(r.unfolding[1])]});
    nm["coefficients"] =
        normal_form_coefficients(r.model, r.pt, r.unfolding);
    write_validated_json(ctx.out_dir / "nmfm.json", nm, "nmfm");
}

void cmd_predict(const RunContext& ctx) {
    const AnalyzeResult r = run_analyze(ctx);
    const json block = ctx.config.value("predict", json::object());
    const std::vector<double> eps = parse_eps_grid(block);

    PredictorSet set;
    switch (r.pt.kind) {
        case Codim2Kind::genh: {
            GenHData d = genh_normal_form(r.model, r.pt, r.unfolding);
            if (const auto ov = block.find("coefficient_overrides");
                ov != block.end()) {
                // Synthetic coefficient replacement for exercising guard
                // paths and what-if analyses.
                for (const auto& [key, value] : ov->items()) {
                    if (key == "c1")
                        d.c1 = Cplx(value[0].get<double>(),
                                    value[1].get<double>());
                    else if (key == "c2")
                        d.c2 = Cplx(value[0].get<double>(),
                                    value[1].get<double>());
                    else
                        throw InvalidInput(fmt::format(
                            "config: unsupported coefficient override '{}'",
                            key));
                }
            }
            set = genh_predictors(d, eps);
            break;
        }
        case Codim2Kind::zeho:
            set = zeho_predictors(zeho_normal_form(r.model, r.pt, r.unfolding),
                                  eps);
            break;
        case Codim2Kind::thopf:
            set = thopf_predictors(
                zeho_normal_form(r.model, r.pt, r.unfolding), eps);
            break;
        case Codim2Kind::hoho:
            set = hoho_predictors(hoho_normal_form(r.model, r.pt, r.unfolding),
                                  eps);
            break;
    }

    json doc;
    doc["metadata"] = make_metadata(ctx, r.model.name);
    doc["source"] = codim2_kind_name(r.pt.kind);
    json branches = json::array();
    std::string cycles = "branch,eps,psi";
    for (int i = 0; i < r.model.n; ++i) cycles += fmt::format(",x{}", i + 1);
    cycles += "\n";
    for (const Predictor& br : set.branches) {
        json points = json::array();
        for (const PredictorPoint& p : br.points) {
            json rec{{"eps", p.eps},
                     {"beta", to_json(p.beta)},
                     {"alpha", to_json(p.alpha)},
                     {"x", to_json(p.x)}};
            if (p.cycle) {
                rec["period"] = p.cycle->T;
                for (size_t k = 0; k < p.cycle->psi.size(); ++k) {
                    cycles += fmt::format("{},{:.17g},{:.17g}", br.name, p.eps,
                                          p.cycle->psi[k]);
                    for (int j = 0; j < r.model.n; ++j)
                        cycles += fmt::format(
                            ",{:.17g}",
                            p.cycle->profile(static_cast<int>(k), j));
                    cycles += "\n";
                }
            }
            points.push_back(std::move(rec));
        }
        branches.push_back({{"name", br.name},
                            {"kind", predictor_kind_name(br.kind)},
                            {"points", std::move(points)}});
    }
    doc["branches"] = std::move(branches);
    json excluded = json::array();
    for (const ExcludedBranch& ex : set.excluded)
        excluded.push_back({{"name", ex.name}, {"reason", ex.reason}});
    doc["excluded"] = std::move(excluded);
    doc["notes"] = set.notes;
    write_validated_json(ctx.out_dir / "predictors.json", doc, "predictors");
    std::ofstream(ctx.out_dir / "cycles.csv") << cycles;
}

namespace {

ProblemKind parse_problem(const std::string& name) {
    if (name == "equilibrium") return ProblemKind::equilibrium;
    if (name == "fold") return ProblemKind::fold;
    if (name == "hopf") return ProblemKind::hopf;
    if (name == "transcritical_equilibrium")
        return ProblemKind::transcritical_equilibrium;
    throw InvalidInput("config: unknown continuation problem '" + name + "'");
}

ContinuationOptions parse_continuation_options(const json& block) {
    ContinuationOptions o;
    o.initial_step = number_or(block, "initial_step", o.initial_step);
    o.min_step = number_or(block, "min_step", o.min_step);
    o.max_step = number_or(block, "max_step", o.max_step);
    o.max_points =
        static_cast<int>(number_or(block, "max_points", o.max_points));
    o.max_corrector_iters = static_cast<int>(
        number_or(block, "max_corrector_iters", o.max_corrector_iters));
    o.corrector_tol = number_or(block, "corrector_tol", o.corrector_tol);
    for (const auto& [key, member] :
         {std::pair<const char*, Eigen::Vector2d*>{"box_lo", &o.box_lo},
          {"box_hi", &o.box_hi},
          {"weights", &o.weights}}) {
        if (block.contains(key)) {
            const Vec v = vec_from_json(block[key]);
            if (v.size() != 2)
                throw InvalidInput(fmt::format(
                    "config: continue.options.{} must have 2 entries", key));
            *member = v;
        }
    }
    return o;
}

} // namespace

void cmd_continue(const RunContext& ctx) {
    const DelayModel model = make_model(require_model_name(ctx.config));
    const Vec alpha = parse_alpha(model, ctx.config);
    const json& block = require_field(ctx.config, "continue", "top level");

    const ProblemKind problem = parse_problem(
        require_field(block, "problem", "continue").get<std::string>());
    const json& fp = require_field(block, "free_params", "continue");
    if (!fp.is_array() || fp.size() != 2)
        throw InvalidInput(
            "config: continue.free_params must list 2 parameter names");
    const std::array<int, 2> free_params{
        param_index(model, fp[0].get<std::string>()),
        param_index(model, fp[1].get<std::string>())};
    if (free_params[0] == free_params[1])
        throw InvalidInput("config: continue.free_params must be distinct");

    Vec x0 = Vec::Zero(model.n);
    if (block.contains("x")) x0 = vec_from_json(block["x"]);
    if (x0.size() != model.n)
        throw InvalidInput("config: continue.x has the wrong dimension");
    const double seed_delta = number_or(block, "seed_delta", 1e-3);

    // Two corrected seed points: the configured guess and the guess shifted
    // along the second free parameter (first for equilibrium problems, whose
    // corrector does not adjust parameters).
    BranchPoint seed0, seed1;
    if (problem == ProblemKind::hopf) {
        const double omega = require_field(block, "omega", "continue")
                                 .get<double>();
        const HopfPoint p0 = correct_hopf(
            model, make_hopf_guess(model, alpha, x0, omega), free_params[0]);
        Vec alpha1 = p0.eq.alpha;
        alpha1(free_params[1]) += seed_delta;
        const HopfPoint p1 = correct_hopf(
            model, make_hopf_guess(model, alpha1, p0.eq.x, p0.omega),
            free_params[0]);
        seed0 = branch_point(p0);
        seed1 = branch_point(p1);
    } else if (problem == ProblemKind::fold) {
        FoldPoint g;
        g.eq = {x0, alpha, 0.0};
        const FoldPoint p0 = correct_fold(model, g, free_params[0]);
        FoldPoint g1 = p0;
        g1.eq.alpha(free_params[1]) += seed_delta;
        const FoldPoint p1 = correct_fold(model, g1, free_params[0]);
        seed0 = branch_point(p0);
        seed1 = branch_point(p1);
    } else {
        const Equilibrium e0 = correct_equilibrium(model, alpha, x0);
        Vec alpha1 = alpha;
        alpha1(free_params[0]) += seed_delta;
        const Equilibrium e1 = correct_equilibrium(model, alpha1, e0.x);
        seed0 = branch_point(e0);
        seed1 = branch_point(e1);
    }

    const ContinuationOptions opts =
        parse_continuation_options(block.value("options", json::object()));
    Branch branch =
        continue_branch(model, problem, seed0, seed1, free_params, opts);
    std::string stop_backward;
    if (block.value("two_sided", false)) {
        Branch back =
            continue_branch(model, problem, seed1, seed0, free_params, opts);
        stop_backward = back.stop_reason;
        std::vector<BranchPoint> merged(back.points.rbegin(),
                                        back.points.rend());
        merged.insert(merged.end(),
                      branch.points.begin() +
                          std::min<size_t>(2, branch.points.size()),
                      branch.points.end());
        branch.points = std::move(merged);
    }
    log(ctx, fmt::format("branch: {} points, stop: {}", branch.points.size(),
                         branch.stop_reason));

    std::vector<std::string> names;
    for (const auto& n : model.param_names) names.push_back(n);
    std::ofstream(ctx.out_dir / "branch.csv") << branch_to_csv(branch, names);

    json doc;
    doc["metadata"] = make_metadata(ctx, model.name);
    doc["problem"] = problem_kind_name(problem);
    doc["free_params"] = json::array(
        {model.param_names[static_cast<size_t>(free_params[0])],
         model.param_names[static_cast<size_t>(free_params[1])]});
    doc["stop_reason"] = branch.stop_reason;
    if (!stop_backward.empty()) doc["stop_reason_backward"] = stop_backward;
    json points = json::array();
    const auto number_or_null = [](double v) {
        return std::isfinite(v) ? json(v) : json(nullptr);
    };
    for (const BranchPoint& p : branch.points) {
        json rec{{"alpha", to_json(p.alpha)},
                 {"x", to_json(p.x)},
                 {"arclength", p.arclength},
                 {"residual", p.residual}};
        if (problem == ProblemKind::hopf) {
            rec["omega"] = p.omega;
            rec["tests"] = {
                {"L1", number_or_null(p.tests.L1)},
                {"nearest_real_eig", number_or_null(p.tests.nearest_real_eig)},
                {"second_pair_re", number_or_null(p.tests.second_pair_re)}};
        }
        points.push_back(std::move(rec));
    }
    doc["points"] = std::move(points);
    write_validated_json(ctx.out_dir / "branch.json", doc, "branch");

    // Codim-2 detection (Hopf branches); always emit detected.json so
    // downstream tooling can rely on the file's presence.
    json det;
    det["metadata"] = make_metadata(ctx, model.name);
    det["raw_crossings"] = 0;
    det["points"] = json::array();
    if (problem == ProblemKind::hopf) {
        std::vector<Codim2Kind> which{Codim2Kind::genh, Codim2Kind::zeho,
                                      Codim2Kind::hoho};
        if (const auto it = block.find("detect"); it != block.end()) {
            which.clear();
            for (const auto& name : *it) {
                const std::string k = name.get<std::string>();
                if (k == "genh") which.push_back(Codim2Kind::genh);
                else if (k == "zeho") which.push_back(Codim2Kind::zeho);
                else if (k == "hoho") which.push_back(Codim2Kind::hoho);
                else if (k == "thopf") which.push_back(Codim2Kind::thopf);
                else
                    throw InvalidInput(
                        "config: unknown detection kind '" + k + "'");
            }
        }
        if (!which.empty()) {
            const Detection d = detect_special_points(model, branch, which);
            det["raw_crossings"] = d.raw_crossings;
            json pts = json::array();
            for (const CodimTwoPoint& c : d.points) {
                json rec{{"kind", codim2_kind_name(c.kind)},
                         {"alpha", to_json(c.eq.alpha)},
                         {"x", to_json(c.eq.x)}};
                switch (c.kind) {
                    case Codim2Kind::genh:
                        rec["omega0"] = c.omega0;
                        rec["L1"] = c.L1;
                        break;
                    case Codim2Kind::zeho:
                    case Codim2Kind::thopf:
                        rec["omega0"] = c.omega0;
                        break;
                    case Codim2Kind::hoho:
                        rec["omega1"] = c.omega1;
                        rec["omega2"] = c.omega2;
                        break;
                }
                try {
                    rec["coefficients"] =
                        normal_form_coefficients(model, c, free_params);
                } catch (const Error& e) {
                    rec["coefficients_error"] = e.kind();
                }
                pts.push_back(std::move(rec));
            }
            det["points"] = std::move(pts);
            log(ctx, fmt::format("detected {} codim-2 points ({} raw)",
                                 d.points.size(), d.raw_crossings));
        }
    }
    write_validated_json(ctx.out_dir / "detected.json", det, "detected");
}

void cmd_simulate(const RunContext& ctx) {
    const DelayModel model = make_model(require_model_name(ctx.config));
    const Vec alpha = parse_alpha(model, ctx.config);
    const json& block = require_field(ctx.config, "simulate", "top level");

    const double t_final =
        require_field(block, "t_final", "simulate").get<double>();
    const Vec h0 = vec_from_json(require_field(block, "history", "simulate"));
    if (h0.size() != model.n)
        throw InvalidInput("config: simulate.history has the wrong dimension");

    SimulateOptions opts;
    opts.dt_max = number_or(block, "dt_max", opts.dt_max);
    opts.abs_tol = number_or(block, "abs_tol", opts.abs_tol);
    opts.keep_window = number_or(block, "keep_window", opts.keep_window);

    HistoryFn history = [h0](double) { return h0; };
    if (const auto it = block.find("warmup"); it != block.end()) {
        // Optional warm-up run (typically at nearby parameter values) whose
        // final delay interval becomes the history of the main run; useful to
        // start on or near an attractor that has a small basin at the target
        // parameters.
        const json& w = *it;
        Vec walpha = alpha;
        if (w.contains("parameters")) walpha = parse_alpha(model, w);
        const double warm_t =
            require_field(w, "t_final", "simulate.warmup").get<double>();
        Vec wh = h0;
        if (w.contains("history")) wh = vec_from_json(w["history"]);
        if (wh.size() != model.n)
            throw InvalidInput(
                "config: simulate.warmup.history has the wrong dimension");
        const auto warm = std::make_shared<Trajectory>(simulate(
            model, walpha, [wh](double) { return wh; }, warm_t, opts));
        log(ctx, fmt::format("warm-up integrated to t = {}", warm->t_end));
        if (!warm->empty())
            history = [warm](double t) { return warm->eval(warm->t_end + t); };
    }

    const Trajectory traj = simulate(model, alpha, history, t_final, opts);
    log(ctx, fmt::format("integrated to t = {} ({} segments)", traj.t_end,
                         traj.segments.size()));

    const double csv_dt = number_or(block, "csv_dt", 0.0);
    std::ofstream(ctx.out_dir / "traj.csv") << trajectory_to_csv(traj, csv_dt);

    std::string sections = "section,t";
    for (int i = 0; i < model.n; ++i) sections += fmt::format(",x{}", i + 1);
    sections += "\n";
    int section_index = 0;
    for (const json& sec : block.value("sections", json::array())) {
        const int comp = static_cast<int>(
            require_field(sec, "component", "simulate.sections")
                .get<double>());
        if (comp < 0 || comp >= model.n)
            throw InvalidInput("config: section component out of range");
        const double level = number_or(sec, "level", 0.0);
        const int direction =
            static_cast<int>(number_or(sec, "direction", 0.0));
        const double window =
            number_or(sec, "window", std::numeric_limits<double>::infinity());
        const double eval_offset = number_or(sec, "eval_offset", 0.0);
        if (!traj.empty()) {
            for (const Crossing& c :
                 poincare_crossings(traj, comp, level, direction)) {
                if (c.t < traj.t_end - window) continue;
                const double ts = c.t + eval_offset;
                if (ts < traj.t_begin || ts > traj.t_end) continue;
                const Vec x = eval_offset == 0.0 ? c.x : traj.eval(ts);
                sections += fmt::format("{},{:.17g}", section_index, c.t);
                for (int i = 0; i < model.n; ++i)
                    sections += fmt::format(",{:.17g}", x(i));
                sections += "\n";
            }
        }
        ++section_index;
    }
    std::ofstream(ctx.out_dir / "sections.csv") << sections;
}

} // namespace ddenorm::cli
