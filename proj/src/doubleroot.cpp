#include "frontlab/doubleroot.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "frontlab/error.hpp"

namespace frontlab {

const char* to_string(RootClass c) {
    switch (c) {
        case RootClass::Simple: return "Simple";
        case RootClass::DoubleDouble: return "DoubleDouble";
        case RootClass::Degenerate: return "Degenerate";
    }
    return "?";
}

const char* to_string(PinchState p) {
    switch (p) {
        case PinchState::Pinched: return "Pinched";
        case PinchState::NotPinched: return "NotPinched";
        case PinchState::Undetermined: return "Undetermined";
        case PinchState::Unchecked: return "Unchecked";
    }
    return "?";
}

namespace {

double falling(int n, int p) {
    double f = 1.0;
    for (int k = 0; k < p; ++k) f *= (n - k);
    return f;
}

double deriv_magnitude(const BivariatePolynomial& bp, int p, int q, cplx lam, cplx nu) {
    double al = std::abs(lam), an = std::abs(nu), total = 0.0;
    for (int i = bp.deg_lambda(); i >= p; --i) {
        double row = 0.0;
        for (int j = bp.deg_nu(); j >= q; --j) row = row * an + std::abs(bp.at(i, j)) * falling(j, q);
        total = total * al + row * falling(i, p);
    }
    return total;
}

}  // namespace

std::pair<double, double> double_root_residuals(const ComovingDispersion& dr, cplx lam, cplx nu) {
    const auto& bp = dr.polynomial();
    double d = std::abs(bp(lam, nu)) / (1.0 + deriv_magnitude(bp, 0, 0, lam, nu));
    double dn = std::abs(bp.deriv(0, 1, lam, nu)) / (1.0 + deriv_magnitude(bp, 0, 1, lam, nu));
    return {d, dn};
}

DoubleRoot newton_double_root(const ComovingDispersion& dr, cplx lam0, cplx nu0, const DoubleRootOptions& opt) {
    const auto& bp = dr.polynomial();
    cplx lam = lam0, nu = nu0;
    auto res = double_root_residuals(dr, lam, nu);
    auto merit = [](std::pair<double, double> r) { return std::max(r.first, r.second); };
    cplx best_l = lam, best_n = nu;
    double best = merit(res);
    int it = 0;
    for (; it < opt.max_newton; ++it) {
        Eigen::Matrix2cd J;
        J << bp.deriv(1, 0, lam, nu), bp.deriv(0, 1, lam, nu), bp.deriv(1, 1, lam, nu), bp.deriv(0, 2, lam, nu);
        Eigen::Vector2cd F(bp(lam, nu), bp.deriv(0, 1, lam, nu));
        if (!std::isfinite(std::abs(F(0))) || !std::isfinite(std::abs(F(1)))) break;
        Eigen::JacobiSVD<Eigen::Matrix2cd> svd(J, Eigen::ComputeFullU | Eigen::ComputeFullV);
        svd.setThreshold(1e-14);
        Eigen::Vector2cd step = svd.solve(F);
        if (!step.allFinite()) break;
        // Damp steps that increase the residual.
        double t = 1.0;
        cplx nl, nn;
        double m = 0.0;
        for (int h = 0; h < 8; ++h) {
            nl = lam - t * step(0);
            nn = nu - t * step(1);
            m = merit(double_root_residuals(dr, nl, nn));
            if (m < merit(res) || m < 1e-15) break;
            t *= 0.5;
        }
        double size = std::abs(t * step(0)) + std::abs(t * step(1));
        lam = nl;
        nu = nn;
        res = double_root_residuals(dr, lam, nu);
        if (merit(res) <= best) best = merit(res), best_l = lam, best_n = nu;
        if (merit(res) < 1e-16 || size < 1e-15 * (1.0 + std::abs(lam) + std::abs(nu))) break;
    }
    if (!(best < opt.tol_root))
        throw Error(ErrorKind::NoConvergence, "double root Newton: " + std::to_string(it) +
                                                  " iterations, residual " + std::to_string(best));
    DoubleRoot r;
    r.lambda = best_l;
    r.nu = best_n;
    std::tie(r.res_d, r.res_dnu) = double_root_residuals(dr, best_l, best_n);
    r.classification = classify_double_root(dr, r, opt);
    return r;
}

RootClass classify_double_root(const ComovingDispersion& dr, const DoubleRoot& root, const DoubleRootOptions& opt) {
    const auto& bp = dr.polynomial();
    cplx l = root.lambda, n = root.nu;
    double dl = std::abs(bp.deriv(1, 0, l, n));
    double dnn = std::abs(bp.deriv(0, 2, l, n));
    if (dl > opt.tol_class && dnn > opt.tol_class) return RootClass::Simple;
    if (dl <= opt.tol_class) {
        cplx a = bp.deriv(2, 0, l, n), b = bp.deriv(1, 1, l, n), c = bp.deriv(0, 2, l, n);
        double scale = std::abs(a) + std::abs(b) + std::abs(c);
        if (scale > opt.tol_class && std::abs(b * b - a * c) > opt.tol_class * scale * scale)
            return RootClass::DoubleDouble;
    }
    return RootClass::Degenerate;
}

EffectiveDiffusivity effective_diffusivity(const ComovingDispersion& dr, const DoubleRoot& root,
                                           const DoubleRootOptions& opt) {
    if (classify_double_root(dr, root, opt) != RootClass::Simple)
        throw Error(ErrorKind::NotSimple, "effective diffusivity requires a simple double root");
    const auto& bp = dr.polynomial();
    EffectiveDiffusivity e;
    e.d_eff = -bp.deriv(0, 2, root.lambda, root.nu) / (2.0 * bp.deriv(1, 0, root.lambda, root.nu));
    e.well_posed = e.d_eff.real() > 0.0;
    return e;
}

namespace {

struct DiscPass {
    std::vector<cplx> lambdas;
    bool degenerate = true;
};

DiscPass discriminant_roots(const ComovingDispersion& dr, double radius) {
    const auto& bp = dr.polynomial();
    const int n = bp.deg_nu();
    const int M = bp.deg_lambda() * (2 * n - 2);
    DiscPass out;
    if (M <= 0) {
        out.degenerate = false;
        return out;
    }
    auto nodes = poly::circle_nodes(M + 1, radius, 0.2917);
    std::vector<cplx> vals(M + 1);
    for (int p = 0; p <= M; ++p) {
        auto a = bp.nu_coefficients(nodes[p]);
        auto r = nu_roots(dr, nodes[p]);
        cplx v = std::pow(a[n], 2 * n - 2);
        double min_sep = 1e300;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                cplx diff = r[i] - r[j];
                v *= diff * diff;
                min_sep = std::min(min_sep, std::abs(diff) / (1.0 + std::abs(r[i]) + std::abs(r[j])));
            }
        if (min_sep > 1e-6) out.degenerate = false;
        vals[p] = v;
    }
    if (out.degenerate) return out;
    // Coefficients of D(radius*y), scaled so the circle values are O(1).
    auto c = poly::interpolate_circle(vals, 1.0, 0.2917);
    int deg = poly::effective_degree(c, 1e-11);
    if (deg <= 0) return out;
    for (auto y : poly::roots(c, deg)) out.lambdas.push_back(radius * y);
    return out;
}

void add_unique(std::vector<DoubleRoot>& list, DoubleRoot r, double tol) {
    for (auto& e : list)
        if (std::abs(e.lambda - r.lambda) < tol * (1.0 + std::abs(r.lambda)) &&
            std::abs(e.nu - r.nu) < tol * (1.0 + std::abs(r.nu))) {
            e.multiplicity += 1;
            return;
        }
    list.push_back(r);
}

}  // namespace

std::vector<DoubleRoot> find_double_roots(const ComovingDispersion& dr, const DoubleRootOptions& opt) {
    std::vector<DoubleRoot> found;
    if (dr.polynomial().deg_nu() < 2) return found;
    std::vector<cplx> cands;
    auto pass = discriminant_roots(dr, 1.0);
    if (pass.degenerate)
        throw Error(ErrorKind::DegenerateFamily,
                    "discriminant vanishes identically: continuum of double roots (repeated factor)");
    cands = pass.lambdas;
    double rmax = 0.0;
    for (auto l : cands) rmax = std::max(rmax, std::abs(l));
    if (rmax > 2.0 && rmax < opt.discard_re) {
        auto p2 = discriminant_roots(dr, rmax);
        cands.insert(cands.end(), p2.lambdas.begin(), p2.lambdas.end());
    }
    // Sort so that multiplicity counts do not depend on which pass found a root.
    std::vector<cplx> pass1(pass.lambdas);
    for (size_t ci = 0; ci < cands.size(); ++ci) {
        cplx lam = cands[ci];
        if (!std::isfinite(std::abs(lam)) || std::abs(lam.real()) > opt.discard_re) continue;
        std::vector<cplx> r;
        try {
            r = nu_roots(dr, lam);
        } catch (const Error&) {
            continue;
        }
        double dmin = 1e300;
        for (size_t i = 0; i < r.size(); ++i)
            for (size_t j = i + 1; j < r.size(); ++j) dmin = std::min(dmin, std::abs(r[i] - r[j]));
        std::vector<DoubleRoot> local;
        for (size_t i = 0; i < r.size(); ++i)
            for (size_t j = i + 1; j < r.size(); ++j) {
                double sep = std::abs(r[i] - r[j]);
                if (sep > std::max(4.0 * dmin, 1e-2 * (1.0 + std::abs(r[i])))) continue;
                try {
                    auto root = newton_double_root(dr, lam, 0.5 * (r[i] + r[j]), opt);
                    if (std::abs(root.lambda.real()) > opt.discard_re) continue;
                    add_unique(local, root, opt.tol_dedup);
                } catch (const Error&) {
                }
            }
        for (auto& root : local) {
            root.multiplicity = 1;
            bool from_second_pass = ci >= pass1.size();
            bool dup = false;
            for (auto& e : found)
                if (std::abs(e.lambda - root.lambda) < opt.tol_dedup * (1.0 + std::abs(root.lambda)) &&
                    std::abs(e.nu - root.nu) < opt.tol_dedup * (1.0 + std::abs(root.nu))) {
                    if (!from_second_pass) e.multiplicity += 1;
                    dup = true;
                }
            if (!dup) found.push_back(root);
        }
    }
    // Newton converges slowly to non-simple roots and may leave a cluster of copies; merge them.
    std::vector<DoubleRoot> merged;
    std::vector<bool> used(found.size(), false);
    for (size_t i = 0; i < found.size(); ++i) {
        if (used[i]) continue;
        used[i] = true;
        if (found[i].classification == RootClass::Simple) {
            merged.push_back(found[i]);
            continue;
        }
        cplx sl = found[i].lambda, sn = found[i].nu;
        int cnt = 1, mult = found[i].multiplicity;
        const double rad = 1e-3 * (1.0 + std::abs(found[i].lambda) + std::abs(found[i].nu));
        for (size_t j = i + 1; j < found.size(); ++j)
            if (!used[j] && found[j].classification != RootClass::Simple &&
                std::abs(found[j].lambda - found[i].lambda) + std::abs(found[j].nu - found[i].nu) < rad) {
                used[j] = true;
                sl += found[j].lambda;
                sn += found[j].nu;
                ++cnt;
                mult += found[j].multiplicity;
            }
        DoubleRoot r = found[i];
        if (cnt > 1) {
            r.lambda = sl / double(cnt);
            r.nu = sn / double(cnt);
            std::tie(r.res_d, r.res_dnu) = double_root_residuals(dr, r.lambda, r.nu);
            r.classification = classify_double_root(dr, r, opt);
            r.multiplicity = mult;
        }
        merged.push_back(r);
    }
    found.swap(merged);
    std::stable_sort(found.begin(), found.end(), [](const DoubleRoot& a, const DoubleRoot& b) {
        if (a.lambda.real() != b.lambda.real()) return a.lambda.real() > b.lambda.real();
        return a.lambda.imag() > b.lambda.imag();
    });
    return found;
}

namespace {

struct Track {
    cplx b1, b2;
};

// Index of the nearest root and whether it is unambiguous.
std::pair<size_t, bool> nearest(const std::vector<cplx>& r, cplx z) {
    size_t best = 0;
    double d1 = 1e300, d2 = 1e300;
    for (size_t i = 0; i < r.size(); ++i) {
        double d = std::abs(r[i] - z);
        if (d < d1) {
            d2 = d1;
            d1 = d;
            best = i;
        } else if (d < d2) {
            d2 = d;
        }
    }
    return {best, d1 < 0.5 * d2};
}

PinchVerdict pinch_along_ray(const ComovingDispersion& dr, const DoubleRoot& root, const PinchOptions& opt,
                             double tilt) {
    const cplx ls = root.lambda;
    const cplx dir = std::polar(1.0, tilt);
    const double tau_max = opt.tau_max > 0 ? opt.tau_max : 1e3 * (1.0 + std::abs(ls));
    // Split the double root: find ε for which the two nearest roots are isolated from the rest.
    double eps = 1e-6 * (1.0 + std::abs(ls));
    Track tr{};
    bool ok = false;
    for (int attempt = 0; attempt < 8 && !ok; ++attempt, eps *= 0.1) {
        auto r = nu_roots(dr, ls + eps * dir);
        if (r.size() < 2) return {PinchState::Undetermined, "fewer than two roots"};
        std::vector<size_t> idx(r.size());
        for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(),
                  [&](size_t a, size_t b) { return std::abs(r[a] - root.nu) < std::abs(r[b] - root.nu); });
        double d2 = std::abs(r[idx[1]] - root.nu);
        double d3 = r.size() > 2 ? std::abs(r[idx[2]] - root.nu) : 1e300;
        double sep = std::abs(r[idx[0]] - r[idx[1]]);
        if (d3 > 4.0 * d2 && sep > 0.0) {
            tr = {r[idx[0]], r[idx[1]]};
            ok = true;
        }
    }
    if (!ok) return {PinchState::Undetermined, "could not split the double root"};
    eps *= 10.0;
    double tau = eps, tau_prev = 0.0;
    Track prev{root.nu, root.nu};
    const double ratio = std::pow(tau_max / eps, 1.0 / std::max(opt.n_steps, 1));
    double next = tau * ratio;
    while (tau < tau_max) {
        next = std::min(next, tau_max);
        // Secant predictor keeps branch identity through transversal crossings.
        double s = (next - tau) / (tau - tau_prev);
        cplx p1 = tr.b1 + s * (tr.b1 - prev.b1), p2 = tr.b2 + s * (tr.b2 - prev.b2);
        auto r = nu_roots(dr, ls + next * dir);
        auto [i1, u1] = nearest(r, p1);
        auto [i2, u2] = nearest(r, p2);
        double drift = std::abs(r[i1] - p1) + std::abs(r[i2] - p2);
        bool smooth = drift < 0.25 * (std::abs(tr.b1 - prev.b1) + std::abs(tr.b2 - prev.b2) + 1e-300) + 1e-9;
        if (!u1 || !u2 || i1 == i2 || !smooth) {
            if (next - tau < opt.min_step * std::max(1.0, tau))
                return {PinchState::Undetermined, "ambiguous root matching at tau=" + std::to_string(tau)};
            next = std::sqrt(tau * next);
            continue;
        }
        prev = tr;
        tau_prev = tau;
        tr = {r[i1], r[i2]};
        tau = next;
        next = tau * ratio;
    }
    double r1 = tr.b1.real(), r2 = tr.b2.real();
    if ((r1 < 0 && r2 > 0) || (r1 > 0 && r2 < 0)) return {PinchState::Pinched, ""};
    return {PinchState::NotPinched, ""};
}

}  // namespace

PinchVerdict check_pinching(const ComovingDispersion& dr, const DoubleRoot& root, const PinchOptions& opt) {
    if (root.classification == RootClass::Degenerate)
        return {PinchState::Undetermined, "degenerate double root"};
    PinchVerdict v;
    try {
        v = pinch_along_ray(dr, root, opt, opt.tilt);
    } catch (const Error& e) {
        v = {PinchState::Undetermined, e.what()};
    }
    if (v.state != PinchState::Undetermined) return v;
    PinchVerdict a, b;
    try {
        a = pinch_along_ray(dr, root, opt, opt.tilt + 0.05);
        b = pinch_along_ray(dr, root, opt, opt.tilt - 0.05);
    } catch (const Error& e) {
        return {PinchState::Undetermined, e.what()};
    }
    if (a.state == b.state && a.state != PinchState::Undetermined) return a;
    return v;
}

std::vector<DoubleRoot> continue_double_root(const DispersionFamily& family, const DoubleRoot& root,
                                             std::span<const double> path, const ContinuationOptions& opt) {
    std::vector<DoubleRoot> out;
    if (path.empty()) return out;
    // Accepted (parameter, root) pairs; the last two give the secant predictor.
    std::vector<std::pair<double, DoubleRoot>> hist;
    PinchVerdict verdict = root.pinched;
    bool was_rightmost = false;
    auto correct = [&](double pn) {
        cplx gl = hist.empty() ? root.lambda : hist.back().second.lambda;
        cplx gn = hist.empty() ? root.nu : hist.back().second.nu;
        if (hist.size() >= 2) {
            const auto& [p1, r1] = hist[hist.size() - 1];
            const auto& [p0, r0] = hist[hist.size() - 2];
            if (p1 != p0) {
                double s = (pn - p1) / (p1 - p0);
                gl = r1.lambda + s * (r1.lambda - r0.lambda);
                gn = r1.nu + s * (r1.nu - r0.nu);
            }
        }
        return newton_double_root(family(pn), gl, gn, opt.roots);
    };
    for (size_t k = 0; k < path.size(); ++k) {
        const double target = path[k];
        if (hist.empty()) {
            try {
                hist.push_back({target, correct(target)});
            } catch (const Error&) {
                throw Error(ErrorKind::StepFailure, "corrector failed at start " + std::to_string(target));
            }
        } else {
            double p = hist.back().first;
            double h = target - p;
            while (p != target) {
                double pn = std::abs(target - p) <= std::abs(h) ? target : p + h;
                try {
                    hist.push_back({pn, correct(pn)});
                    p = pn;
                } catch (const Error&) {
                    h *= 0.5;
                    if (std::abs(h) < opt.min_step * (1.0 + std::abs(p)))
                        throw Error(ErrorKind::StepFailure, "corrector failed near parameter " + std::to_string(pn));
                }
            }
        }
        DoubleRoot last = hist.back().second;
        auto dr = family(target);
        bool recheck = verdict.state == PinchState::Unchecked;
        bool rightmost = true;
        try {
            for (const auto& o : find_double_roots(dr, opt.roots)) {
                double dist = std::abs(o.lambda - last.lambda) + std::abs(o.nu - last.nu);
                bool same = dist < 1e-6 * (1.0 + std::abs(last.lambda));
                if (!same && dist < opt.collision_guard) recheck = true;
                if (!same && o.lambda.real() > last.lambda.real() + opt.roots.tol_dedup) rightmost = false;
            }
        } catch (const Error&) {
            recheck = true;
        }
        if (k > 0 && was_rightmost && !rightmost) recheck = true;
        was_rightmost = rightmost;
        if (recheck) verdict = check_pinching(dr, last, opt.pinch);
        last.pinched = verdict;
        out.push_back(last);
    }
    return out;
}

}  // namespace frontlab
