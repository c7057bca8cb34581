#include "frontlab/commands.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "frontlab/error.hpp"
#include "frontlab/frontbvp.hpp"
#include "frontlab/kernels.hpp"
#include "frontlab/simulate.hpp"
#include "frontlab/spreading.hpp"
#include "frontlab/wavetrain.hpp"

namespace frontlab {

using nlohmann::json;

namespace {

std::string fmt(const char* f, double v) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string num(double v) { return fmt("%.10g", v); }

std::string cnum(cplx z) {
    if (z.imag() == 0.0) return num(z.real());
    return num(z.real()) + (z.imag() < 0 ? " - " : " + ") + num(std::abs(z.imag())) + "i";
}

SpreadingOptions spreading_options(const RunConfig& cfg) {
    SpreadingOptions o;
    o.roots.tol_root = cfg.real("tolerances", "root");
    o.include_multiple = cfg.boolean("speed", "include_multiple");
    return o;
}

SpreadingResult spreading(const RunConfig& cfg, const ModelSpec& m) {
    std::optional<std::pair<double, double>> bracket;
    if (cfg.has("speed", "c_lo") || cfg.has("speed", "c_hi")) {
        if (!cfg.has("speed", "c_lo") || !cfg.has("speed", "c_hi"))
            throw Error(ErrorKind::ConfigError, "speed bracket needs both c_lo and c_hi");
        bracket = std::make_pair(cfg.real("speed", "c_lo"), cfg.real("speed", "c_hi"));
    }
    return linear_spreading_speed(m.symbol, bracket, spreading_options(cfg));
}

json root_json(const DoubleRoot& r) {
    return {{"lambda", to_json(r.lambda)},
            {"nu", to_json(r.nu)},
            {"classification", to_string(r.classification)},
            {"pinched", to_string(r.pinched.state)},
            {"pinch_reason", r.pinched.reason},
            {"res_d", r.res_d},
            {"res_dnu", r.res_dnu},
            {"multiplicity", r.multiplicity}};
}

void profile_csv(OutputDir& out, const std::string& base, const std::string& title, const std::vector<double>& xi,
                 const Mat& u) {
    std::vector<std::string> header{"xi"};
    for (int c = 0; c < u.rows(); ++c) header.push_back("u" + std::to_string(c));
    std::vector<std::vector<double>> rows;
    for (size_t i = 0; i < xi.size(); ++i) {
        std::vector<double> r{xi[i]};
        for (int c = 0; c < u.rows(); ++c) r.push_back(u(c, i));
        rows.push_back(std::move(r));
    }
    out.write_csv(base + ".csv", header, rows);
    std::vector<int> ycols;
    for (int c = 0; c < u.rows(); ++c) ycols.push_back(c + 2);
    out.write_gnuplot(base + ".gp", base + ".csv", title, 1, ycols, header);
}

std::string default_family_param(const std::string& model) {
    if (model == "nagumo") return "a";
    if (model == "cqgl") return "alpha";
    if (model == "kpp_pitchfork") return "mu";
    return "";
}

}  // namespace

int thread_budget() {
    if (const char* env = std::getenv("FRONTLAB_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1)
            throw Error(ErrorKind::ConfigError, std::string("FRONTLAB_THREADS must be a positive integer, got '") + env + "'");
        return static_cast<int>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

CommandResult cmd_speed(const RunConfig& cfg, OutputDir& out) {
    ModelSpec m = resolve_model(cfg);
    SpreadingResult sr = spreading(cfg, m);
    WavenumberPrediction wp = wavenumber_predictions(sr);
    CommandResult res;
    res.report = {{"model", m.name},
                  {"c_lin", sr.c_lin},
                  {"omega_lin", sr.omega_lin},
                  {"nu_lin", to_json(sr.nu_lin)},
                  {"eta_lin", sr.eta_lin},
                  {"k_lin", wp.k_lin},
                  {"k_node", wp.k_node},
                  {"d_eff", to_json(sr.d_eff)},
                  {"d_eff_well_posed", sr.d_eff_well_posed},
                  {"multi_interval", sr.multi_interval},
                  {"bracket_verified", sr.bracket_verified},
                  {"bracket", {sr.final_bracket.first, sr.final_bracket.second}},
                  {"reduced", sr.reduced},
                  {"root", root_json(sr.source_root)}};
    json refs = json::array();
    if (m.registered) {
        try {
            for (const auto& r : reference_values(m)) refs.push_back({{"quantity", r.quantity}, {"value", r.value}, {"note", r.note}});
        } catch (const Error&) {
        }
    }
    res.report["reference"] = refs;
    std::ostringstream s;
    s << "model       " << m.name << "\n";
    s << "c_lin       " << num(sr.c_lin) << "\n";
    s << "omega_lin   " << num(sr.omega_lin) << "\n";
    s << "nu_lin      " << cnum(sr.nu_lin) << "\n";
    s << "k_lin       " << num(wp.k_lin) << "\n";
    s << "k_node      " << num(wp.k_node) << "\n";
    s << "d_eff       " << cnum(sr.d_eff) << (sr.d_eff_well_posed ? "" : " (Re d_eff <= 0)") << "\n";
    for (const auto& r : refs)
        s << "reference   " << r["quantity"].get<std::string>() << " = " << num(r["value"].get<double>()) << "\n";
    res.summary = s.str();
    out.write_json("speed.json", res.report);
    return res;
}

CommandResult cmd_roots(const RunConfig& cfg, OutputDir& out) {
    ModelSpec m = resolve_model(cfg);
    double c = cfg.has("roots", "c") ? cfg.real("roots", "c") : spreading(cfg, m).c_lin;
    ComovingDispersion dr(m.symbol, c);
    DoubleRootOptions ro;
    ro.tol_root = cfg.real("tolerances", "root");
    std::vector<DoubleRoot> roots = find_double_roots(dr, ro);
    json arr = json::array();
    std::vector<std::vector<std::string>> rows;
    std::ostringstream s;
    s << "c = " << num(c) << ", " << roots.size() << " double roots\n";
    for (auto& r : roots) {
        if (r.pinched.state == PinchState::Unchecked) r.pinched = check_pinching(dr, r);
        arr.push_back(root_json(r));
        rows.push_back({format_real(r.lambda.real()), format_real(r.lambda.imag()), format_real(r.nu.real()),
                        format_real(r.nu.imag()), to_string(r.classification), to_string(r.pinched.state)});
        s << "lambda " << cnum(r.lambda) << "  nu " << cnum(r.nu) << "  " << to_string(r.classification) << "  "
          << to_string(r.pinched.state) << "\n";
    }
    CommandResult res;
    res.report = {{"model", m.name}, {"c", c}, {"roots", arr}};
    res.summary = s.str();
    out.write_json("roots.json", res.report);
    out.write_csv("roots.csv", {"lambda_re", "lambda_im", "nu_re", "nu_im", "class", "pinched"}, rows);
    return res;
}

CommandResult cmd_spectrum(const RunConfig& cfg, OutputDir& out) {
    ModelSpec m = resolve_model(cfg);
    double c = cfg.real("spectrum", "c"), eta = cfg.real("spectrum", "eta");
    int nk = cfg.integer("spectrum", "n_k");
    if (nk < 2) throw Error(ErrorKind::ConfigError, "spectrum.n_k must be at least 2");
    std::vector<double> ks = linspace(-cfg.real("spectrum", "k_max"), cfg.real("spectrum", "k_max"), nk);
    ComovingDispersion dr(m.symbol, c);
    SpectrumCurve curve = essential_spectrum(dr, eta, ks);
    std::vector<std::vector<double>> rows;
    for (const auto& smp : curve.samples)
        for (size_t b = 0; b < smp.lambdas.size(); ++b)
            rows.push_back({smp.k, static_cast<double>(b), smp.lambdas[b].real(), smp.lambdas[b].imag()});
    CommandResult res;
    res.report = {{"model", m.name}, {"c", c}, {"eta", eta}, {"max_re", curve.max_re}, {"n_k", nk}};
    res.summary = "max Re lambda = " + num(curve.max_re) + " (c = " + num(c) + ", eta = " + num(eta) + ")\n";
    out.write_json("spectrum.json", res.report);
    std::vector<std::string> header{"k", "branch", "re", "im"};
    out.write_csv("spectrum.csv", header, rows);
    out.write_gnuplot("spectrum.gp", "spectrum.csv", "essential spectrum", 3, {4}, header);
    return res;
}

CommandResult cmd_simulate(const RunConfig& cfg, OutputDir& out) {
    ModelSpec m = resolve_model(cfg);
    SimConfig sc;
    sc.L = cfg.real("simulate", "L");
    sc.n_grid = cfg.integer("simulate", "n");
    sc.dt = cfg.real("simulate", "dt");
    sc.t_end = cfg.real("simulate", "t_end");
    std::string bc = cfg.str("simulate", "bc");
    if (bc == "invasion")
        sc.bc = BoundaryKind::InvasionBox;
    else if (bc == "periodic")
        sc.bc = BoundaryKind::Periodic;
    else
        throw Error(ErrorKind::ConfigError, "simulate.bc must be invasion or periodic");
    std::string ic = cfg.str("simulate", "ic");
    if (ic == "step")
        sc.ic.kind = InitialKind::Step;
    else if (ic == "negative_step")
        sc.ic.kind = InitialKind::NegativeStep;
    else if (ic == "gaussian")
        sc.ic.kind = InitialKind::Gaussian;
    else if (ic == "zero")
        sc.ic.kind = InitialKind::Zero;
    else
        throw Error(ErrorKind::ConfigError, "simulate.ic must be step, negative_step, gaussian or zero");
    sc.ic.width = cfg.real("simulate", "ic_width");
    sc.ic.amplitude = cfg.real("simulate", "ic_amplitude");
    sc.threshold = cfg.real("simulate", "threshold");
    sc.component = cfg.integer("simulate", "component");
    sc.envelope_width = cfg.real("simulate", "envelope");
    sc.sample_interval = cfg.real("simulate", "sample_interval");
    sc.snapshot_times = cfg.reals("simulate", "snapshots");
    sc.parallel = cfg.boolean("simulate", "parallel");
    if (sc.parallel) kernels::set_threads(thread_budget());

    CommandResult res;
    SimResult sim;
    json extra = json::object();
    if (cfg.has("simulate", "comoving")) {
        ComovingResult cr = run_comoving(m, cfg.real("simulate", "comoving"), sc);
        sim = std::move(cr.sim);
        extra["drift"] = cr.drift;
        extra["frame_speed"] = cfg.real("simulate", "comoving");
    } else {
        sim = cfg.boolean("simulate", "linear") ? run_linear(m, sc) : run_invasion(m, sc);
    }
    res.status = to_string(sim.status);
    res.report = {{"model", m.name}, {"status", res.status}, {"t_final", sim.t_final}, {"steps", sim.steps},
                  {"threshold", sim.track.threshold}, {"samples", sim.track.samples.size()}};
    res.report.update(extra);
    std::ostringstream s;
    s << "status      " << res.status << " at t = " << num(sim.t_final) << "\n";
    if (sim.status == RunStatus::FrontReachedBoundary)
        res.warning = "front reached the right boundary at t = " + num(sim.t_final) + "; results are partial";
    if (extra.contains("drift")) s << "drift       " << num(extra["drift"].get<double>()) << "\n";
    try {
        SpeedEstimate est = estimate_speed(sim.track);
        res.report["c_ext"] = est.c_ext;
        res.report["a1"] = est.a1;
        res.report["kappa_log"] = est.kappa_log;
        res.report["c_raw_final"] = est.c_raw.empty() ? 0.0 : est.c_raw.back().x;
        res.report["fit_window"] = {est.t0, est.t1};
        s << "c_ext       " << num(est.c_ext) << "\n";
        s << "kappa_log   " << num(est.kappa_log) << "\n";
        std::vector<std::vector<double>> rows;
        for (const auto& p : est.c_raw) rows.push_back({p.t, p.x});
        out.write_csv("speed.csv", {"t", "c_raw"}, rows);
        out.write_gnuplot("speed.gp", "speed.csv", "front speed", 1, {2}, {"t", "c_raw"});
    } catch (const Error& e) {
        res.report["speed_estimate_error"] = e.what();
        s << "c_ext       unavailable (" << e.what() << ")\n";
    }
    if (m.registered || m.name == "user") {
        try {
            SpreadingResult sr = spreading(cfg, m);
            res.report["c_lin"] = sr.c_lin;
            s << "c_lin       " << num(sr.c_lin) << " (linear prediction)\n";
        } catch (const Error& e) {
            res.report["c_lin_error"] = e.what();
        }
    }
    res.summary = s.str();
    std::vector<std::vector<double>> rows;
    for (const auto& p : sim.track.samples) rows.push_back({p.t, p.x});
    out.write_csv("track.csv", {"t", "x"}, rows);
    out.write_gnuplot("track.gp", "track.csv", "front position", 1, {2}, {"t", "x"});
    std::vector<double> xs(sim.state.cols());
    for (size_t i = 0; i < xs.size(); ++i) xs[i] = sim.h * i;
    profile_csv(out, "final", "final state", xs, sim.state);
    for (size_t i = 0; i < sim.snapshots.size(); ++i)
        profile_csv(out, "snapshot_" + std::to_string(i), "t = " + num(sim.snapshots[i].t), xs, sim.snapshots[i].u);
    out.write_json("simulate.json", res.report);
    return res;
}

CommandResult cmd_front(const RunConfig& cfg, OutputDir& out) {
    ModelSpec m = resolve_model(cfg);
    std::string mode = cfg.str("front", "mode");
    double L = cfg.real("front", "L"), h = cfg.real("front", "h");
    if (!(h > 0) || !(L > 0)) throw Error(ErrorKind::ConfigError, "front.L and front.h must be positive");
    FrontOptions fo;
    fo.n = static_cast<int>(std::lround(L / h)) + 1;
    fo.newton.tol = cfg.real("tolerances", "newton");
    double pcen = cfg.real("front", "phase_center") * L;
    fo.phase_window = std::make_pair(pcen - 1.0, pcen + 1.0);
    CommandResult res;
    std::ostringstream s;
    FrontProfile prof;
    res.report = {{"model", m.name}, {"mode", mode}, {"L", L}, {"h", h}};
    if (mode == "pulled") {
        double c, eta;
        if (cfg.has("front", "c") && cfg.has("front", "eta")) {
            c = cfg.real("front", "c");
            eta = cfg.real("front", "eta");
        } else {
            SpreadingResult sr = spreading(cfg, m);
            c = cfg.has("front", "c") ? cfg.real("front", "c") : sr.c_lin;
            eta = cfg.has("front", "eta") ? cfg.real("front", "eta") : sr.eta_lin;
        }
        PulledOptions po;
        po.front = fo;
        po.phase_center = cfg.real("front", "phase_center");
        po.front.phase_window.reset();
        PulledFront pf = solve_pulled_front(m, c, eta, L, std::nullopt, po);
        prof = pf.profile;
        res.report["a"] = pf.decomp.a;
        res.report["b"] = pf.decomp.b;
        res.report["eta"] = eta;
        res.report["core_rate"] = std::isfinite(pf.decomp.core_rate) ? json(pf.decomp.core_rate) : json(nullptr);
        s << "a           " << num(pf.decomp.a) << "\n";
        s << "b           " << num(pf.decomp.b) << "\n";
    } else if (mode == "free" || mode == "fixed") {
        bool unknown = mode == "free";
        double c0;
        if (cfg.has("front", "c"))
            c0 = cfg.real("front", "c");
        else if (unknown)
            c0 = spreading(cfg, m).c_lin;
        else
            throw Error(ErrorKind::ConfigError, "fixed mode needs front.c");
        prof = solve_front_newton(m, L, unknown, {c0, {}, cfg.real("front", "steepness")}, fo);
    } else {
        throw Error(ErrorKind::ConfigError, "front.mode must be free, fixed or pulled");
    }
    res.report["c"] = prof.c;
    res.report["residual"] = prof.residual;
    res.report["iterations"] = prof.iterations;
    s << "c           " << num(prof.c) << "\n";
    s << "residual    " << fmt("%.3e", prof.residual) << " after " << prof.iterations << " iterations\n";
    try {
        DecayFit df = front_decay_rate(m, prof);
        res.report["nu_tail"] = to_json(df.nu);
        res.report["tail_class"] = df.cls == TailClass::Steep ? "steep" : "generic";
        s << "nu_tail     " << cnum(df.nu) << " (" << (df.cls == TailClass::Steep ? "steep" : "generic") << ")\n";
    } catch (const Error& e) {
        res.report["nu_tail_error"] = e.what();
    }
    if (cfg.boolean("front", "spectrum")) {
        double w = cfg.has("front", "weight") ? cfg.real("front", "weight") : prof.c / 2;
        FrontSpectrum sp = front_spectrum(m, prof, w, cfg.integer("front", "n_eigs"));
        json ev = json::array();
        for (cplx z : sp.eigenvalues) ev.push_back(to_json(z));
        res.report["spectrum"] = {{"weight", w},
                                  {"eigenvalues", ev},
                                  {"nearest_zero", to_json(sp.nearest_zero)},
                                  {"translation_correlation", sp.translation_correlation},
                                  {"sigma_min", sp.sigma_min}};
        s << "weight      " << num(w) << "\n";
        for (cplx z : sp.eigenvalues) s << "eigenvalue  " << cnum(z) << "\n";
    }
    if (!cfg.str("front", "continue_param").empty()) {
        if (mode != "free") throw Error(ErrorKind::ConfigError, "continuation requires front.mode = free");
        std::string par = cfg.str("front", "continue_param");
        double from = m.param(par), to = cfg.real("front", "continue_to");
        int steps = cfg.integer("front", "continue_steps");
        if (steps < 1) throw Error(ErrorKind::ConfigError, "front.continue_steps must be positive");
        std::vector<double> path = linspace(from, to, steps + 1);
        ModelFamily fam = model_family(m.name, par, cfg.params());
        ContinuationReport cr = continue_front(fam, prof, L, path, cfg.boolean("front", "arclength"), fo);
        std::vector<std::vector<double>> rows;
        for (const auto& bp : cr.branch) rows.push_back({bp.mu, bp.profile.c});
        out.write_csv("branch.csv", {par, "c"}, rows);
        out.write_gnuplot("branch.gp", "branch.csv", "front branch", 1, {2}, {par, "c"});
        res.report["branch_points"] = cr.branch.size();
        res.report["branch_terminated"] = cr.terminated;
        if (!cr.branch.empty()) res.report["branch_end"] = {{par, cr.branch.back().mu}, {"c", cr.branch.back().profile.c}};
        s << "branch      " << cr.branch.size() << " points" << (cr.terminated ? ", terminated early" : "") << "\n";
    }
    res.summary = s.str();
    profile_csv(out, "profile", "front profile", prof.xi, prof.u);
    out.write_json("front.json", res.report);
    return res;
}

CommandResult cmd_transition(const RunConfig& cfg, OutputDir& out) {
    if (!cfg.str("model", "symbol").empty()) throw Error(ErrorKind::NotApplicable, "transitions need a registered model");
    std::string name = cfg.str("model", "name");
    std::string par = cfg.str("transition", "param");
    if (par.empty()) par = default_family_param(name);
    if (par.empty()) throw Error(ErrorKind::ConfigError, "transition.param is required for model " + name);
    if (!cfg.has("transition", "lo") || !cfg.has("transition", "hi"))
        throw Error(ErrorKind::ConfigError, "transition needs a bracket (transition.lo, transition.hi)");
    cfg.validate();
    ModelFamily fam = model_family(name, par, cfg.params());
    PulledOptions po;
    po.front.newton.tol = cfg.real("tolerances", "newton");
    TransitionResult tr = detect_transition(fam, {cfg.real("transition", "lo"), cfg.real("transition", "hi")},
                                            cfg.real("transition", "L"), linear_data_from_spreading(), po);
    CommandResult res;
    res.report = {{"model", name}, {"param", par}, {"value", tr.mu}, {"c_lin", tr.c_lin}, {"eta", tr.eta},
                  {"evaluations", tr.history.size()}};
    std::string label = par + "_*";
    label.resize(std::max<size_t>(label.size() + 1, 12), ' ');
    res.summary = label + num(tr.mu) + "\nc_lin       " + num(tr.c_lin) + "\n";
    std::vector<std::vector<double>> rows;
    for (auto [mu, a] : tr.history) rows.push_back({mu, a});
    out.write_csv("history.csv", {par, "a"}, rows);
    profile_csv(out, "profile", "front at the transition", tr.front.profile.xi, tr.front.profile.u);
    out.write_json("transition.json", res.report);
    return res;
}

CommandResult cmd_wavenumber(const RunConfig& cfg, OutputDir& out) {
    ModelSpec m = resolve_model(cfg);
    SpreadingResult sr = spreading(cfg, m);
    WaveTrainOptions wo;
    wo.tol = cfg.real("tolerances", "bvp");
    UnstableBand band = unstable_band(m);
    double pad = 1e-3 * (band.k_hi - band.k_lo);
    double lo = cfg.has("wavenumber", "k_lo") ? cfg.real("wavenumber", "k_lo") : std::max(band.k_lo, pad);
    double hi = cfg.has("wavenumber", "k_hi") ? cfg.real("wavenumber", "k_hi") : band.k_hi - pad;
    double k_seed = std::clamp(band.k_peak, lo, hi);
    WaveTrain seed = seed_wave_train(m, k_seed, cfg.integer("wavenumber", "n_per"), wo);
    DispersionOptions dopt;
    dopt.n_samples = cfg.integer("wavenumber", "n_samples");
    dopt.newton = wo;
    DispersionCurve curve = nonlinear_dispersion(m, {lo, hi}, seed, dopt);
    std::vector<std::vector<double>> rows;
    for (const auto& w : curve.samples) rows.push_back({w.k, w.omega, w.group_velocity});
    std::vector<std::string> header{"k", "omega", "group_velocity"};
    out.write_csv("dispersion.csv", header, rows);
    out.write_gnuplot("dispersion.gp", "dispersion.csv", "nonlinear dispersion relation", 1, {2}, header);
    int p = cfg.integer("wavenumber", "p"), q = cfg.integer("wavenumber", "q");
    std::vector<WavenumberSolution> sols = select_wavenumber(m, sr, curve, p, q, wo);
    json arr = json::array();
    std::ostringstream s;
    s << "c_lin " << num(sr.c_lin) << ", omega_lin " << num(sr.omega_lin) << ", p:q = " << p << ":" << q << "\n";
    for (const auto& x : sols) {
        arr.push_back({{"k", x.k},
                       {"omega_nl", x.omega_nl},
                       {"branch", x.branch},
                       {"comoving_group_velocity", x.comoving_group_velocity},
                       {"admissible", x.admissible},
                       {"resonance_residual", x.resonance_residual}});
        s << "k = " << num(x.k) << "  omega_nl = " << num(x.omega_nl) << "  cg - c = " << num(x.comoving_group_velocity)
          << (x.admissible ? "  admissible" : "  not admissible") << "\n";
    }
    CommandResult res;
    res.report = {{"model", m.name}, {"c_lin", sr.c_lin}, {"omega_lin", sr.omega_lin}, {"p", p}, {"q", q},
                  {"k_range", {lo, hi}}, {"solutions", arr}};
    if (!sols.empty()) res.report["k"] = sols.front().k;
    if (curve.fold_low) res.report["fold_low"] = *curve.fold_low;
    if (curve.fold_high) res.report["fold_high"] = *curve.fold_high;
    res.summary = s.str();
    out.write_json("wavenumber.json", res.report);
    return res;
}

CommandResult cmd_models(const RunConfig& cfg, OutputDir& out) {
    std::vector<std::string> names;
    bool explicit_model = cfg.to_json().contains("model");
    if (explicit_model)
        names.push_back(cfg.str("model", "name"));
    else
        names = model_names();
    json arr = json::array();
    std::ostringstream s;
    for (const auto& n : names) {
        ParamMap p = default_params(n);
        if (explicit_model) {
            cfg.validate();
            for (const auto& [k, v] : cfg.params()) p[k] = v;
        }
        json jp = json::object();
        for (const auto& [k, v] : p) jp[k] = v;
        json refs = json::array();
        try {
            for (const auto& r : reference_values(get_model(n, p)))
                refs.push_back({{"quantity", r.quantity}, {"value", r.value}, {"note", r.note}});
        } catch (const Error&) {
        }
        arr.push_back({{"name", n}, {"description", model_description(n)}, {"params", jp}, {"reference", refs}});
        s << n << ": " << model_description(n) << "\n";
        for (const auto& [k, v] : p) s << "    " << k << " = " << num(v) << "\n";
    }
    CommandResult res;
    res.report = {{"models", arr}};
    res.summary = s.str();
    out.write_json("models.json", res.report);
    return res;
}

namespace {

struct GridAxis {
    std::string name;
    std::vector<double> values;
};

std::vector<GridAxis> parse_grid(const std::string& text) {
    std::vector<GridAxis> axes;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos) throw Error(ErrorKind::ConfigError, "grid entry '" + item + "' must be name=lo:hi:n");
        GridAxis ax;
        ax.name = item.substr(0, eq);
        std::vector<std::string> parts;
        std::stringstream ps(item.substr(eq + 1));
        std::string p;
        while (std::getline(ps, p, ':')) parts.push_back(p);
        if (parts.size() != 3) throw Error(ErrorKind::ConfigError, "grid entry '" + item + "' must be name=lo:hi:n");
        RunConfig probe;
        probe.set("spectrum", "c", parts[0]);
        double lo = probe.real("spectrum", "c");
        probe.set("spectrum", "c", parts[1]);
        double hi = probe.real("spectrum", "c");
        probe.set("spectrum", "n_k", parts[2]);
        int n = probe.integer("spectrum", "n_k");
        if (n < 1) throw Error(ErrorKind::ConfigError, "grid entry '" + item + "' needs n >= 1");
        ax.values = n == 1 ? std::vector<double>{lo} : linspace(lo, hi, n);
        axes.push_back(std::move(ax));
    }
    if (axes.empty()) throw Error(ErrorKind::ConfigError, "sweep.grid is empty");
    return axes;
}

/// Top-level scalars of a report; complex numbers become name.re / name.im.
std::map<std::string, std::string> flatten(const json& j) {
    std::map<std::string, std::string> out;
    for (const auto& [k, v] : j.items()) {
        if (v.is_number()) out[k] = format_real(v.get<double>());
        else if (v.is_boolean()) out[k] = v.get<bool>() ? "true" : "false";
        else if (v.is_string()) out[k] = v.get<std::string>();
        else if (v.is_object() && v.contains("re") && v.contains("im") && v.size() == 2) {
            out[k + ".re"] = format_real(v["re"].get<double>());
            out[k + ".im"] = format_real(v["im"].get<double>());
        }
    }
    return out;
}

}  // namespace

CommandResult cmd_sweep(const RunConfig& cfg, OutputDir& out) {
    std::string command = cfg.str("sweep", "command");
    if (command == "sweep" || command == "models")
        throw Error(ErrorKind::ConfigError, "sweep cannot map '" + command + "'");
    std::vector<GridAxis> axes = parse_grid(cfg.str("sweep", "grid"));
    std::vector<std::vector<double>> points{{}};
    for (const auto& ax : axes) {
        std::vector<std::vector<double>> next;
        for (const auto& p : points)
            for (double v : ax.values) {
                auto q = p;
                q.push_back(v);
                next.push_back(q);
            }
        points = std::move(next);
    }
    std::vector<std::map<std::string, std::string>> results(points.size());
    std::atomic<size_t> next{0};
    int workers = std::min<int>(thread_budget(), static_cast<int>(points.size()));
    auto work = [&] {
        for (size_t i = next++; i < points.size(); i = next++) {
            RunConfig job = cfg;
            for (size_t a = 0; a < axes.size(); ++a) job.set_param(axes[a].name, points[i][a]);
            OutputDir none;
            try {
                results[i] = flatten(run_command(command, job, none).report);
                results[i]["error"] = "";
            } catch (const Error& e) {
                results[i]["error"] = to_string(e.kind());
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();

    std::set<std::string> keys;
    for (const auto& r : results)
        for (const auto& [k, v] : r) keys.insert(k);
    keys.erase("error");
    std::vector<std::string> header;
    for (const auto& ax : axes) header.push_back(ax.name);
    header.insert(header.end(), keys.begin(), keys.end());
    header.push_back("error");
    std::vector<std::vector<std::string>> rows;
    int failures = 0;
    for (size_t i = 0; i < points.size(); ++i) {
        std::vector<std::string> row;
        for (double v : points[i]) row.push_back(format_real(v));
        for (const auto& k : keys) {
            auto it = results[i].find(k);
            row.push_back(it == results[i].end() ? "" : it->second);
        }
        row.push_back(results[i]["error"]);
        if (!results[i]["error"].empty()) ++failures;
        rows.push_back(std::move(row));
    }
    out.write_csv("sweep.csv", header, rows);
    CommandResult res;
    res.report = {{"command", command}, {"jobs", points.size()}, {"failures", failures}};
    std::ostringstream s;
    for (size_t i = 0; i < header.size(); ++i) s << (i ? "," : "") << header[i];
    s << "\n";
    for (const auto& r : rows) {
        for (size_t i = 0; i < r.size(); ++i) s << (i ? "," : "") << r[i];
        s << "\n";
    }
    res.summary = s.str();
    if (failures) res.warning = std::to_string(failures) + " of " + std::to_string(points.size()) + " sweep jobs failed";
    out.write_json("sweep.json", res.report);
    return res;
}

CommandResult run_command(const std::string& name, const RunConfig& cfg, OutputDir& out) {
    if (name == "speed") return cmd_speed(cfg, out);
    if (name == "roots") return cmd_roots(cfg, out);
    if (name == "spectrum") return cmd_spectrum(cfg, out);
    if (name == "simulate") return cmd_simulate(cfg, out);
    if (name == "front") return cmd_front(cfg, out);
    if (name == "transition") return cmd_transition(cfg, out);
    if (name == "wavenumber") return cmd_wavenumber(cfg, out);
    if (name == "models") return cmd_models(cfg, out);
    if (name == "sweep") return cmd_sweep(cfg, out);
    throw Error(ErrorKind::InvalidArgument, "unknown command '" + name + "'");
}

namespace {

struct CliInputs {
    std::string config_file, model, out, grid, command, param_name, mode;
    std::vector<std::string> params, sets;
    std::vector<double> bracket, k_range;
    std::optional<double> c, eta, L;
    std::optional<int> p, q, seed;
    bool json = false;
};

void apply_param(RunConfig& cfg, const std::string& kv) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::ConfigError, "--param expects name=value, got '" + kv + "'");
    cfg.set("params", kv.substr(0, eq), kv.substr(eq + 1));
}

void apply_set(RunConfig& cfg, const std::string& kv) {
    auto eq = kv.find('=');
    auto dot = kv.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq)
        throw Error(ErrorKind::ConfigError, "--set expects section.key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, dot), kv.substr(dot + 1, eq - dot - 1), kv.substr(eq + 1));
}

}  // namespace

int run_cli(int argc, char** argv) {
    CLI::App app{"frontlab: spreading speeds, front solvers and wake selection for invasion fronts"};
    app.require_subcommand(1);
    CliInputs in;
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"speed", "linear spreading speed from the pinched double root"},
        {"roots", "all double roots of the dispersion relation at a frame speed"},
        {"spectrum", "essential spectrum of the invaded state"},
        {"simulate", "direct simulation of the invasion process"},
        {"front", "traveling front boundary-value solve"},
        {"transition", "pushed-to-pulled transition along a parameter family"},
        {"wavenumber", "wake wavenumber from the resonance condition"},
        {"models", "list registered models"},
        {"sweep", "map a command over a parameter grid"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", in.config_file, "sectioned key/value or JSON configuration file");
        sub->add_option("--model", in.model, "registered model name");
        sub->add_option("--param", in.params, "model parameter name=value")->take_all();
        sub->add_option("--set", in.sets, "any configuration key, section.key=value")->take_all();
        sub->add_option("--out", in.out, "output directory");
        sub->add_option("--seed", in.seed, "seed for randomized multi-starts");
        sub->add_flag("--json", in.json, "print the JSON report instead of the summary");
        if (name == "speed" || name == "transition")
            sub->add_option("--bracket", in.bracket, "lower and upper bracket ends")->expected(2);
        if (name == "roots" || name == "spectrum" || name == "front") sub->add_option("--c", in.c, "frame speed");
        if (name == "spectrum" || name == "front") sub->add_option("--eta", in.eta, "exponential weight");
        if (name == "simulate" || name == "front" || name == "transition") sub->add_option("--L", in.L, "domain length");
        if (name == "front") sub->add_option("--mode", in.mode, "free | fixed | pulled");
        if (name == "transition") sub->add_option("--family-param", in.param_name, "parameter varied along the family");
        if (name == "wavenumber") {
            sub->add_option("--p", in.p, "resonance numerator");
            sub->add_option("--q", in.q, "resonance denominator");
            sub->add_option("--k-range", in.k_range, "dispersion curve range")->expected(2);
        }
        if (name == "sweep") {
            sub->add_option("--command", in.command, "command to map");
            sub->add_option("--grid", in.grid, "name=lo:hi:n, several separated by ','");
        }
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    std::string name = app.get_subcommands().front()->get_name();
    try {
        RunConfig cfg;
        if (!in.config_file.empty()) cfg = RunConfig::load(in.config_file);
        if (!in.model.empty()) cfg.set("model", "name", in.model);
        for (const auto& kv : in.params) apply_param(cfg, kv);
        for (const auto& kv : in.sets) apply_set(cfg, kv);
        if (!in.out.empty()) cfg.set("output", "out", in.out);
        if (in.seed) cfg.set("output", "seed", std::to_string(*in.seed));
        if (!in.bracket.empty()) {
            std::string sec = name == "speed" ? "speed" : "transition";
            cfg.set(sec, name == "speed" ? "c_lo" : "lo", format_real(in.bracket[0]));
            cfg.set(sec, name == "speed" ? "c_hi" : "hi", format_real(in.bracket[1]));
        }
        if (in.c) cfg.set(name == "front" ? "front" : name, "c", format_real(*in.c));
        if (in.eta) cfg.set(name, "eta", format_real(*in.eta));
        if (in.L) cfg.set(name, "L", format_real(*in.L));
        if (!in.mode.empty()) cfg.set("front", "mode", in.mode);
        if (!in.param_name.empty()) cfg.set("transition", "param", in.param_name);
        if (in.p) cfg.set("wavenumber", "p", std::to_string(*in.p));
        if (in.q) cfg.set("wavenumber", "q", std::to_string(*in.q));
        if (!in.k_range.empty()) {
            cfg.set("wavenumber", "k_lo", format_real(in.k_range[0]));
            cfg.set("wavenumber", "k_hi", format_real(in.k_range[1]));
        }
        if (!in.command.empty()) cfg.set("sweep", "command", in.command);
        if (!in.grid.empty()) cfg.set("sweep", "grid", in.grid);

        OutputDir out;
        if (!cfg.str("output", "out").empty()) out = OutputDir(cfg.str("output", "out"));
        CommandResult res = run_command(name, cfg, out);
        out.write_manifest(name, cfg.to_json(true), res.status);
        if (in.json)
            std::cout << res.report.dump(2) << "\n";
        else
            std::cout << res.summary;
        if (!res.warning.empty()) std::cerr << "frontlab: warning: " << res.warning << "\n";
        return 0;
    } catch (const Error& e) {
        std::cerr << "frontlab: " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "frontlab: internal error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace frontlab
