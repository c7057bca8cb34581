#include "frontlab/models.hpp"

#include <cmath>
#include <numbers>

#include "frontlab/error.hpp"

namespace frontlab {

namespace {

Mat diag2(double a, double b) {
    Mat m = Mat::Zero(2, 2);
    m(0, 0) = a;
    m(1, 1) = b;
    return m;
}

Mat mat2(double a, double b, double c, double d) {
    Mat m(2, 2);
    m << a, b, c, d;
    return m;
}

Mat scalar(double a) { return Mat::Constant(1, 1, a); }

/// Symbol coefficients of a scalar operator Σ p_j ∂^j.
std::vector<Mat> scalar_coeffs(std::initializer_list<double> p) {
    std::vector<Mat> out;
    for (double v : p) out.push_back(scalar(v));
    return out;
}

struct Entry {
    std::string description;
    ParamMap defaults;
    std::function<void(ModelSpec&)> build;
};

void require(bool ok, const std::string& name, const std::string& msg) {
    if (!ok) throw Error(ErrorKind::ParameterOutOfRange, name + ": " + msg);
}

void scalar_cubic(ModelSpec& s, double c1, double c2, double c3) {
    // f(u) = c1 u + c2 u² + c3 u³
    s.f = [=](const double* u, double* o) { o[0] = u[0] * (c1 + u[0] * (c2 + c3 * u[0])); };
    s.df = [=](const double* u, double* j) { j[0] = c1 + u[0] * (2 * c2 + 3 * c3 * u[0]); };
}

void build_fkpp(ModelSpec& s) {
    s.symbol = MatrixPolynomial(scalar_coeffs({0, 0, 1}), scalar(1));
    scalar_cubic(s, 1, -1, 0);
    s.wake_state = {1.0};
}

void build_nagumo(ModelSpec& s) {
    double a = s.param("a");
    require(a > 0, "nagumo", "a must be positive for an unstable rest state");
    // u(1−u)(u+a) = a u + (1−a) u² − u³
    s.symbol = MatrixPolynomial(scalar_coeffs({0, 0, 1}), scalar(a));
    scalar_cubic(s, a, 1 - a, -1);
    s.wake_state = {1.0};
}

void build_bistable(ModelSpec& s) {
    double a = s.param("a");
    require(a > 0 && a < 1, "bistable", "need 0 < a < 1");
    // u(1−u)(u−a) = −a u + (1+a) u² − u³
    s.symbol = MatrixPolynomial(scalar_coeffs({0, 0, 1}), scalar(-a));
    scalar_cubic(s, -a, 1 + a, -1);
    s.wake_state = {1.0};
}

void build_sh(ModelSpec& s) {
    double eps = s.param("eps"), gam = s.param("gamma");
    require(eps > 0, "sh", "eps must be positive");
    s.symbol = MatrixPolynomial(scalar_coeffs({-1, 0, -2, 0, -1}), scalar(eps * eps));
    scalar_cubic(s, eps * eps, gam, -1);
}

void build_fourth(ModelSpec& s) {
    double a = s.param("a"), b = s.param("b");
    bool unstable = (a >= 0 && b > 0) || (a < 0 && a * a / 4 + b > 0);
    require(unstable, "fourth", "rest state is stable (need b > 0 for a >= 0, or a^2/4 + b > 0 for a < 0)");
    s.symbol = MatrixPolynomial(scalar_coeffs({0, 0, a, 0, -1}), scalar(b));
    scalar_cubic(s, b, 0, -1);
    if (b > 0 && a >= 0) s.wake_state = {std::sqrt(b)};
}

void build_ch(ModelSpec& s) {
    double ub = s.param("ubar"), gam = s.param("gamma");
    double lin = 1 + 2 * gam * ub - 3 * ub * ub;
    require(lin > 0, "ch", "mean state is linearly stable (need 1 + 2 gamma ubar - 3 ubar^2 > 0)");
    // −(w_xx + h(ū+w))_xx with h(u) = u + γu² − u³, w = u − ū.
    s.symbol = MatrixPolynomial(scalar_coeffs({0, 0, -lin, 0, -1}), scalar(0));
    s.f = [](const double*, double* o) { o[0] = 0.0; };
    s.df = [](const double*, double* j) { j[0] = 0.0; };
    // Nonlinear part of −h: −[γ(2ū w + w²) − (3ū² w + 3ū w² + w³)] minus its linear part.
    s.g = [=](const double* u, double* o) {
        double w = u[0];
        o[0] = -(gam * w * w - 3 * ub * w * w - w * w * w);
    };
    s.dg = [=](const double* u, double* j) {
        double w = u[0];
        j[0] = -(2 * gam * w - 6 * ub * w - 3 * w * w);
    };
}

void cgl_nonlinear(ModelSpec& s, const Mat& J, double beta) {
    // J u − (1+iβ) A|A|² for A = u + iv
    s.f = [=](const double* u, double* o) {
        double r2 = u[0] * u[0] + u[1] * u[1];
        o[0] = J(0, 0) * u[0] + J(0, 1) * u[1] - (u[0] - beta * u[1]) * r2;
        o[1] = J(1, 0) * u[0] + J(1, 1) * u[1] - (beta * u[0] + u[1]) * r2;
    };
    s.df = [=](const double* u, double* j) {
        double x = u[0], y = u[1], r2 = x * x + y * y;
        double p = x - beta * y, q = beta * x + y;
        j[0] = J(0, 0) - r2 - 2 * x * p;
        j[1] = J(0, 1) + beta * r2 - 2 * y * p;
        j[2] = J(1, 0) - beta * r2 - 2 * x * q;
        j[3] = J(1, 1) - r2 - 2 * y * q;
    };
    s.realified = true;
}

void build_cgl(ModelSpec& s) {
    double al = s.param("alpha"), be = s.param("beta"), om = s.param("omega");
    Mat P2 = mat2(1, -al, al, 1);
    Mat J = mat2(1, -om, om, 1);
    s.symbol = MatrixPolynomial({Mat::Zero(2, 2), Mat::Zero(2, 2), P2}, J);
    cgl_nonlinear(s, J, be);
}

void build_forced_cgl(ModelSpec& s) {
    double al = s.param("alpha"), be = s.param("beta"), om = s.param("omega"), ga = s.param("gamma");
    Mat P2 = mat2(1, -al, al, 1);
    Mat J = mat2(1 + ga, -om, om, 1 - ga);
    s.symbol = MatrixPolynomial({Mat::Zero(2, 2), Mat::Zero(2, 2), P2}, J);
    cgl_nonlinear(s, J, be);
}

void build_cqgl(ModelSpec& s) {
    double al = s.param("alpha");
    s.symbol = MatrixPolynomial(scalar_coeffs({0, 0, 1}), scalar(1));
    s.f = [=](const double* u, double* o) {
        double x = u[0], x2 = x * x;
        o[0] = x * (1 + x2 * (al - x2));
    };
    s.df = [=](const double* u, double* j) {
        double x2 = u[0] * u[0];
        j[0] = 1 + 3 * al * x2 - 5 * x2 * x2;
    };
    s.wake_state = {std::sqrt((al + std::sqrt(al * al + 4)) / 2)};
}

void build_fhn(ModelSpec& s) {
    double a = s.param("a"), eps = s.param("eps"), gam = s.param("gamma");
    require(a < 0, "fhn", "the origin is unstable only for a < 0");
    require(eps > 0, "fhn", "eps must be positive");
    Mat J = mat2(-a, -1, eps, -eps * gam);
    s.symbol = MatrixPolynomial({Mat::Zero(2, 2), Mat::Zero(2, 2), diag2(1, 0)}, J);
    // u(1−u)(u−a) − v, ε(u − γv)
    s.f = [=](const double* u, double* o) {
        double x = u[0];
        o[0] = x * (1 - x) * (x - a) - u[1];
        o[1] = eps * (x - gam * u[1]);
    };
    s.df = [=](const double* u, double* j) {
        double x = u[0];
        j[0] = -a + 2 * (1 + a) * x - 3 * x * x;
        j[1] = -1;
        j[2] = eps;
        j[3] = -eps * gam;
    };
    s.nondiffusive = {false, true};
}

void build_coupled_mode(ModelSpec& s) {
    double ga = s.param("gamma"), de = s.param("delta");
    double e1 = s.param("eps1"), e2 = s.param("eps2"), io = s.param("iota");
    require(std::abs(de) < 1, "coupled_mode", "need |delta| < 1 for positive diffusivities");
    Mat J = mat2(1 + ga, e1, e2, 1 - ga);
    s.symbol = MatrixPolynomial({Mat::Zero(2, 2), Mat::Zero(2, 2), diag2(1 + de, 1 - de)}, J);
    s.f = [=](const double* u, double* o) {
        double x = u[0], y = u[1], r2 = x * x + y * y;
        o[0] = (1 + ga) * x + e1 * y - x * r2 + io * (x * x - y * y);
        o[1] = (1 - ga) * y + e2 * x - y * r2 + io * x * y;
    };
    s.df = [=](const double* u, double* j) {
        double x = u[0], y = u[1], r2 = x * x + y * y;
        j[0] = 1 + ga - r2 - 2 * x * x + 2 * io * x;
        j[1] = e1 - 2 * x * y - 2 * io * y;
        j[2] = e2 - 2 * x * y + io * y;
        j[3] = 1 - ga - r2 - 2 * y * y + io * x;
    };
    if (e1 == 0 && e2 == 0 && io == 0) {
        if (ga >= 0 && 1 + ga > 0)
            s.wake_state = {std::sqrt(1 + ga), 0.0};
        else if (1 - ga > 0)
            s.wake_state = {0.0, std::sqrt(1 - ga)};
    }
}

void build_kpp_pitchfork(ModelSpec& s) {
    double mu = s.param("mu");
    require(mu < 1, "kpp_pitchfork", "need mu < 1 for an unstable origin");
    // −u(u+1)(u−1)((u−1)²−μ)
    s.symbol = MatrixPolynomial(scalar_coeffs({0, 0, 1}), scalar(1 - mu));
    s.f = [=](const double* u, double* o) {
        double x = u[0], w = (x - 1) * (x - 1) - mu;
        o[0] = -x * (x * x - 1) * w;
    };
    s.df = [=](const double* u, double* j) {
        double x = u[0], w = (x - 1) * (x - 1) - mu;
        j[0] = -(3 * x * x - 1) * w - x * (x * x - 1) * 2 * (x - 1);
    };
    s.wake_state = {mu > 0 ? 1 - std::sqrt(mu) : 1.0};
}

void build_fkpp_diff(ModelSpec& s) {
    double al = s.param("alpha"), d = s.param("d");
    require(d > 0, "fkpp_diff", "d must be positive");
    s.symbol = MatrixPolynomial({Mat::Zero(2, 2), Mat::Zero(2, 2), diag2(1, d)}, mat2(1, al, 0, 0));
    s.f = [=](const double* u, double* o) {
        o[0] = u[0] * (1 - u[0]) + al * u[1];
        o[1] = 0.0;
    };
    s.df = [=](const double* u, double* j) {
        j[0] = 1 - 2 * u[0];
        j[1] = al;
        j[2] = 0;
        j[3] = 0;
    };
    s.wake_state = {1.0, 0.0};
}

void build_lotka_volterra(ModelSpec& s) {
    double a = s.param("a"), b = s.param("b"), r = s.param("r"), d = s.param("d");
    require(b < 1, "lotka_volterra", "the state (1,0) is unstable only for b < 1");
    require(r > 0 && d > 0, "lotka_volterra", "r and d must be positive");
    // p = u − 1, q = v: p_t = p_xx − (1+p)(p + a q), q_t = d q_xx + r q (1 − b − b p − q)
    Mat J = mat2(-1, -a, 0, r * (1 - b));
    s.symbol = MatrixPolynomial({Mat::Zero(2, 2), Mat::Zero(2, 2), diag2(1, d)}, J);
    s.f = [=](const double* u, double* o) {
        double p = u[0], q = u[1];
        o[0] = -(1 + p) * (p + a * q);
        o[1] = r * q * (1 - b - b * p - q);
    };
    s.df = [=](const double* u, double* j) {
        double p = u[0], q = u[1];
        j[0] = -(p + a * q) - (1 + p);
        j[1] = -a * (1 + p);
        j[2] = -r * b * q;
        j[3] = r * (1 - b - b * p - q) - r * q;
    };
    if (a > 1) s.wake_state = {-1.0, 1.0};
}

const std::map<std::string, Entry>& registry() {
    static const std::map<std::string, Entry> reg = {
        {"fkpp", {"u_t = u_xx + u(1-u)", {}, build_fkpp}},
        {"nagumo", {"u_t = u_xx + u(1-u)(u+a)", {{"a", 0.2}}, build_nagumo}},
        {"bistable", {"u_t = u_xx + u(1-u)(u-a)", {{"a", 0.3}}, build_bistable}},
        {"sh", {"u_t = -(dxx+1)^2 u + eps^2 u + gamma u^2 - u^3", {{"eps", 0.4}, {"gamma", 0.0}}, build_sh}},
        {"fourth", {"u_t = -u_xxxx + a u_xx + b u - u^3", {{"a", 1.0}, {"b", 0.05}}, build_fourth}},
        {"ch", {"u_t = -(u_xx + u + gamma u^2 - u^3)_xx about u = ubar", {{"ubar", 0.2}, {"gamma", 0.0}}, build_ch}},
        {"cgl", {"A_t = (1+i alpha)A_xx + (1+i omega)A - (1+i beta)A|A|^2, A = u+iv",
                 {{"alpha", 1.0}, {"beta", 0.5}, {"omega", 0.0}}, build_cgl}},
        {"forced_cgl", {"cgl with parametric forcing + gamma conj(A)",
                        {{"alpha", 0.1}, {"beta", 0.0}, {"omega", 0.0}, {"gamma", 0.2}}, build_forced_cgl}},
        {"cqgl", {"u_t = u_xx + u + alpha u^3 - u^5", {{"alpha", 1.0}}, build_cqgl}},
        {"fhn", {"u_t = u_xx + u(1-u)(u-a) - v, v_t = eps(u - gamma v)",
                 {{"a", -0.2}, {"eps", 0.01}, {"gamma", 0.0}}, build_fhn}},
        {"coupled_mode", {"u_t = (1+delta)u_xx + (1+gamma)u - u r^2 + eps1 v + iota(u^2-v^2), "
                          "v_t = (1-delta)v_xx + (1-gamma)v - v r^2 + eps2 u + iota u v",
                          {{"gamma", 0.8}, {"delta", -0.9}, {"eps1", 0.0}, {"eps2", 0.0}, {"iota", 0.0}},
                          build_coupled_mode}},
        {"kpp_pitchfork", {"u_t = u_xx - u(u+1)(u-1)((u-1)^2 - mu)", {{"mu", 0.1}}, build_kpp_pitchfork}},
        {"fkpp_diff", {"u_t = u_xx + u(1-u) + alpha v, v_t = d v_xx", {{"alpha", 1.0}, {"d", 1.0}}, build_fkpp_diff}},
        {"lotka_volterra", {"u_t = u_xx + u(1-u-a v), v_t = d v_xx + r v(1-b u-v), shifted so (1,0) is 0",
                            {{"a", 1.5}, {"b", 0.5}, {"r", 1.0}, {"d", 1.0}}, build_lotka_volterra}},
    };
    return reg;
}

const Entry& lookup(const std::string& name) {
    const auto& reg = registry();
    auto it = reg.find(name);
    if (it == reg.end()) throw Error(ErrorKind::UnknownModel, "no model named '" + name + "'");
    return it->second;
}

void mark_nondiffusive(ModelSpec& s) {
    if (!s.nondiffusive.empty()) return;
    const Mat& lead = s.symbol.coeff(s.order());
    s.nondiffusive.assign(s.dim(), false);
    for (int i = 0; i < s.dim(); ++i) s.nondiffusive[i] = lead.row(i).norm() == 0.0;
}

}  // namespace

double ModelSpec::param(const std::string& key) const {
    auto it = params.find(key);
    if (it == params.end()) throw Error(ErrorKind::InvalidArgument, name + " has no parameter '" + key + "'");
    return it->second;
}

ModelSpec get_model(const std::string& name, const ParamMap& overrides) {
    const Entry& e = lookup(name);
    ModelSpec s;
    s.name = name;
    s.description = e.description;
    s.params = e.defaults;
    for (const auto& [k, v] : overrides) {
        if (!s.params.count(k)) throw Error(ErrorKind::InvalidArgument, name + " has no parameter '" + k + "'");
        if (!std::isfinite(v)) throw Error(ErrorKind::ParameterOutOfRange, name + ": " + k + " is not finite");
        s.params[k] = v;
    }
    e.build(s);
    mark_nondiffusive(s);
    return s;
}

std::vector<std::string> model_names() {
    std::vector<std::string> out;
    for (const auto& [k, v] : registry()) out.push_back(k);
    return out;
}

ParamMap default_params(const std::string& name) { return lookup(name).defaults; }

std::string model_description(const std::string& name) { return lookup(name).description; }

ModelSpec user_model(const std::string& name, const MatrixPolynomial& symbol) {
    ModelSpec s;
    s.name = name;
    s.description = "user symbol, linear kinetics";
    s.symbol = symbol;
    s.registered = false;
    Mat J = symbol.linearization();
    int n = symbol.dim();
    s.f = [J, n](const double* u, double* o) {
        Eigen::Map<const Vec> x(u, n);
        Eigen::Map<Vec>(o, n) = J * x;
    };
    s.df = [J, n](const double*, double* j) {
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) j[r * n + c] = J(r, c);
    };
    mark_nondiffusive(s);
    return s;
}

ModelSpec linearized(const ModelSpec& spec) {
    ModelSpec s = user_model(spec.name + "_linear", spec.symbol);
    s.params = spec.params;
    s.realified = spec.realified;
    s.nondiffusive = spec.nondiffusive;
    return s;
}

ModelFamily model_family(const std::string& name, const std::string& param, const ParamMap& base) {
    ParamMap defaults = default_params(name);
    if (!defaults.count(param)) throw Error(ErrorKind::InvalidArgument, name + " has no parameter '" + param + "'");
    return [name, param, base](double v) {
        ParamMap p = base;
        p[param] = v;
        return get_model(name, p);
    };
}

FourthOrderRoot fourth_order_region_I(double a, double b) {
    FourthOrderRoot r;
    if (!(a > 0 && b > 0 && b < a * a / 12)) return r;
    double s = std::sqrt(a * a - 12 * b);
    r.nu = {-std::sqrt(a - s) / std::sqrt(6.0), 0.0};
    r.c = 2.0 / (3 * std::sqrt(6.0)) * (2 * a + s) * std::sqrt(a - s);
    r.valid = true;
    return r;
}

FourthOrderRoot fourth_order_region_II(double a, double b) {
    FourthOrderRoot r;
    if (!(a > 0 && b > 0 && b < a * a / 12)) return r;
    double s = std::sqrt(a * a - 12 * b);
    r.nu = {-std::sqrt(a + s) / std::sqrt(6.0), 0.0};
    r.c = 2.0 / (3 * std::sqrt(6.0)) * (2 * a - s) * std::sqrt(a + s);
    r.valid = true;
    return r;
}

FourthOrderRoot fourth_order_region_IV(double a, double b) {
    FourthOrderRoot r;
    if (!((a >= 0 && b > a * a / 12) || (a < 0 && b > -a * a / 4))) return r;
    double s = std::sqrt(7 * a * a + 24 * b);
    r.nu = {-std::sqrt(a + s) / (2 * std::sqrt(6.0)), std::sqrt(-3 * a + s) / (2 * std::sqrt(2.0))};
    r.c = 2.0 / (3 * std::sqrt(6.0)) * (-2 * a + s) * std::sqrt(a + s);
    r.omega = std::pow(-3 * a + s, 1.5) * std::sqrt(a + s) / (8 * std::sqrt(3.0));
    r.valid = true;
    return r;
}

std::vector<ReferenceValue> reference_values(const ModelSpec& s) {
    using std::sqrt;
    std::vector<ReferenceValue> out;
    auto add = [&](const std::string& q, double v, const std::string& note) { out.push_back({q, v, note}); };
    auto fourth = [&](double a, double b) {
        auto I = fourth_order_region_I(a, b);
        auto IV = fourth_order_region_IV(a, b);
        if (I.valid) {
            add("c_lin", I.c, "region I, real double root");
            add("omega_lin", 0.0, "region I");
            add("nu_lin_re", I.nu.real(), "region I");
            add("d_eff", sqrt(a * a - 12 * b), "region I");
            auto II = fourth_order_region_II(a, b);
            add("c_region_II", II.c, "real double root, not pinched");
        } else if (IV.valid) {
            add("c_lin", IV.c, "region IV, complex double root");
            add("omega_lin", IV.omega, "region IV");
            add("nu_lin_re", IV.nu.real(), "region IV");
            add("nu_lin_im", IV.nu.imag(), "region IV");
            add("k_node", IV.omega / IV.c, "node conservation");
        }
    };
    const std::string& n = s.name;
    if (!s.registered) throw Error(ErrorKind::NotApplicable, "no closed forms for user symbols");
    if (n == "fkpp") {
        add("c_lin", 2.0, "lambda_* = 1 - c^2/4");
        add("omega_lin", 0.0, "");
        add("nu_lin_re", -1.0, "");
        add("d_eff", 1.0, "");
        add("kappa_log", 1.5, "3/(2 eta_lin)");
    } else if (n == "nagumo") {
        double a = s.param("a");
        add("c_lin", 2 * sqrt(a), "");
        add("c_pushed", (1 + 2 * a) / sqrt(2.0), a < 0.5 ? "selected (pushed)" : "not selected for a >= 1/2");
        add("c_selected", a < 0.5 ? (1 + 2 * a) / sqrt(2.0) : 2 * sqrt(a), "");
        add("a_transition", 0.5, "2 sqrt(a) = (1+2a)/sqrt(2)");
    } else if (n == "bistable") {
        add("c_front", (1 - 2 * s.param("a")) / sqrt(2.0), "explicit front");
    } else if (n == "sh") {
        double e = s.param("eps");
        fourth(-2.0, e * e - 1);
        add("c_series", 4 * e + std::pow(e, 3) - 9.0 / 8 * std::pow(e, 5), "small eps expansion");
        add("k_series", 1 + e * e / 8 - 13.0 / 128 * std::pow(e, 4), "small eps expansion");
    } else if (n == "fourth") {
        fourth(s.param("a"), s.param("b"));
    } else if (n == "ch") {
        double ub = s.param("ubar"), g = s.param("gamma");
        fourth(-(1 + 2 * g * ub - 3 * ub * ub), 0.0);
    } else if (n == "cgl") {
        double al = s.param("alpha"), om = s.param("omega");
        double q = sqrt(1 + al * al);
        add("c_lin", 2 * q, "");
        add("omega_lin", al + om, "");
        add("nu_lin_re", -1 / q, "from d_nu = 0: nu = -c/(2(1+i alpha))");
        add("nu_lin_im", al / q, "");
        double be = s.param("beta");
        if (al != be) add("k_s_minus", (q - sqrt(1 + be * be)) / (al - be), "1:1 resonance in the wake");
    } else if (n == "forced_cgl") {
        double al = s.param("alpha"), om = s.param("omega"), g = s.param("gamma");
        double D = (al + om) * (al + om) - g * g;
        if (D > 0) {
            add("c_lin_leading", 2.0, "oscillatory case, speed correction is higher order");
            add("omega_lin_leading", sqrt(D), "oscillatory case");
        } else {
            add("c_lin_leading", 2 + sqrt(-D), "locked case");
            add("omega_lin_leading", 0.0, "locked case");
        }
    } else if (n == "cqgl") {
        double al = s.param("alpha");
        add("c_lin", 2.0, "");
        add("alpha_transition", 2 / sqrt(3.0), "");
        if (al > 2 / sqrt(3.0)) add("c_pushed", (-al + 2 * sqrt(4 + al * al)) / sqrt(3.0), "");
    } else if (n == "fhn") {
        double a = s.param("a"), e = s.param("eps"), g = s.param("gamma");
        if (g != 0 || a * a <= 3 * e)
            throw Error(ErrorKind::NotApplicable, "fhn: closed form needs gamma = 0 and a^2 > 3 eps");
        double r = sqrt(a * a - 3 * e), w = sqrt(-a + 2 * r);
        add("c_lin", sqrt(3.0) * (-a + r) / w, "real crossing double root");
        add("omega_lin", 0.0, "");
        add("nu_lin_re", -w / sqrt(3.0), "");
    } else if (n == "coupled_mode") {
        double g = s.param("gamma"), d = s.param("delta");
        double cu = (1 + d) * (1 + g) > 0 ? 2 * sqrt((1 + d) * (1 + g)) : 0.0;
        double cv = (1 - d) * (1 - g) > 0 ? 2 * sqrt((1 - d) * (1 - g)) : 0.0;
        add("c_lin", std::max(cu, cv), "uncoupled factors");
        if (g * d < 0) {
            add("c_ddr", (g - d) / sqrt(-g * d), "cross double root");
            add("nu_ddr", sqrt(-g / d), "");
            add("in_Q_ddr", ((g + d + 2 * g * d) * (g + d - 2 * g * d) < 0) ? 1.0 : 0.0, "cross root pinched");
        }
    } else if (n == "kpp_pitchfork") {
        add("c_lin", 2 * sqrt(1 - s.param("mu")), "");
    } else if (n == "fkpp_diff") {
        add("c_lin", 2.0, "u-factor");
    } else if (n == "lotka_volterra") {
        double b = s.param("b"), r = s.param("r"), d = s.param("d");
        add("c_lin", 2 * sqrt(d * r * (1 - b)), "v-factor");
    }
    if (out.empty()) throw Error(ErrorKind::NotApplicable, n + ": no closed forms at these parameters");
    return out;
}

}  // namespace frontlab
