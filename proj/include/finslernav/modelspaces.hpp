#pragma once

#include <string>
#include <vector>

#include "finslernav/manifold_spec.hpp"

namespace finslernav {

// Certified properties a model claims; every claim is re-verified numerically
// before the model is handed out. Negative-control kinds assert that a
// residual *exceeds* the bound, so a broken control cannot silently pass.
enum class CertKind {
    UnitWind,                  // | |W|_h - 1 | <= tol at samples
    SubcriticalWind,           // sup |W|_h < 1 - regime tolerance
    KillingWind,               // symmetrized covariant derivative of W <= tol
    WindConformal,             // W_{i|j} + W_{j|i} = -4 c h_ij with c = expected
    WindConformalAny,          // same equation with the per-point trace fit
    SectionalIsotropy,         // sectional curvature = expected within tol
    FlatZeroCurvature,         // |Ric|, |K|, |S| <= tol at cone samples
    ConformalV,                // V conformal with factor = expected within tol
    KillingV,                  // V Killing within tol
    KillingResidualExceeds,    // wind Killing residual >= tol (negative control)
    ConformalResidualExceeds,  // wind conformal-fit residual >= tol (negative control)
    NonEinstein,               // Einstein-fit residual of h >= tol (negative control)
};

struct Certificate {
    CertKind kind;
    double tolerance = 0.0;
    double expected = 0.0;
};

struct CertificateResult {
    std::string property;
    double tolerance = 0.0;
    double residual = 0.0;
    bool passed = false;
};

struct ModelSpace {
    std::string name;
    ManifoldSpec spec;
    std::vector<Certificate> certificates;
};

// Generators.
ModelSpace euclidean_wind(int n, const Vecd& W);
ModelSpace euclidean_conformal(int n, double scale);
ModelSpace s3_hopf();

// Registry of every built-in model (including the negative controls).
std::vector<std::string> model_names();

// Re-verify a model's certificates numerically.
std::vector<CertificateResult> run_certificates(const ModelSpace& ms);

// Fetch a model by name; certificates are verified once per process and a
// failure makes the model unusable.
const ModelSpace& model(const std::string& name);

// Fetch and resolve to a LoadedSpec (certificate-checked).
LoadedSpec load_model(const std::string& name);

} // namespace finslernav
