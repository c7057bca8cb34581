#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "frontlab/polymat.hpp"

namespace frontlab {

using ParamMap = std::map<std::string, double>;

/// Pointwise map R^N → R^N.
using PointMap = std::function<void(const double* u, double* out)>;
/// Pointwise Jacobian, written row-major into an N×N buffer.
using PointJac = std::function<void(const double* u, double* jac)>;

struct ReferenceValue {
    std::string quantity;
    double value = 0.0;
    std::string note;
};

/// u_t = P(∂x)u + f(u) + ∂x² g(u), with the invaded state at u = 0.
struct ModelSpec {
    std::string name;
    std::string description;
    ParamMap params;
    MatrixPolynomial symbol;
    PointMap f;
    PointJac df;
    /// Divergence-form term (conserved dynamics); empty when absent.
    PointMap g;
    PointJac dg;
    bool realified = false;
    /// Components whose highest-order coefficient vanishes (integrated explicitly).
    std::vector<bool> nondiffusive;
    /// Homogeneous state selected in the wake, if stationary and known.
    std::vector<double> wake_state;
    /// False for user symbols, which cannot be re-instantiated by name.
    bool registered = true;

    int dim() const { return symbol.dim(); }
    int order() const { return symbol.order(); }
    double param(const std::string& key) const;
    bool has_g() const { return static_cast<bool>(g); }
};

ModelSpec get_model(const std::string& name, const ParamMap& overrides = {});

/// Registered name → default parameters.
std::vector<std::string> model_names();
ParamMap default_params(const std::string& name);
std::string model_description(const std::string& name);

/// Known closed-form values at the model's current parameters.
std::vector<ReferenceValue> reference_values(const ModelSpec& spec);

/// Linear model from raw symbol coefficients; f(u) = J u.
ModelSpec user_model(const std::string& name, const MatrixPolynomial& symbol);

/// Same model with f replaced by its linearization at 0.
ModelSpec linearized(const ModelSpec& spec);

/// Family over one parameter of a registered model.
using ModelFamily = std::function<ModelSpec(double)>;
ModelFamily model_family(const std::string& name, const std::string& param, const ParamMap& base = {});

/// Closed forms for u_t = −u_xxxx + a u_xx + b u.
struct FourthOrderRoot {
    double c = 0.0;
    double omega = 0.0;
    cplx nu;
    bool valid = false;
};
FourthOrderRoot fourth_order_region_I(double a, double b);
FourthOrderRoot fourth_order_region_II(double a, double b);
FourthOrderRoot fourth_order_region_IV(double a, double b);

}  // namespace frontlab
