#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "finslernav/manifold_spec.hpp"

namespace finslernav {

// Default tolerances: hypothesis residuals run through field pipelines,
// conclusion residuals through curvature pipelines which lose about two
// digits; both sit well above measured noise on the model charts.
struct CheckOptions {
    int samples = 20;
    std::uint64_t seed = 42;
    double tol_h = 1e-7;
    double tol_c = 1e-5;
};

// Residual level treated as a genuine violation (as opposed to noise) when
// deciding that both sides of an equivalence failed together.
inline constexpr double kJointFailureLevel = 1e-4;

struct WorstSample {
    Vecd x, y;
    double residual = 0.0;
};

// One property-check outcome. "pass" means hypothesis and conclusion held;
// "vacuous" means the hypothesis failed so the implication says nothing;
// "joint-fail" means both sides of an equivalence were violated together
// (the expected outcome on negative controls); "fail" is a genuine breach.
struct CheckResult {
    std::string check_id;
    std::string spec_id;
    int samples = 0;
    std::uint64_t seed = 0;
    double tol_h = 0.0;
    double tol_c = 0.0;
    double hypothesis_residual = 0.0;
    double conclusion_residual = 0.0;
    std::map<std::string, double> constants;
    std::string verdict;
    WorstSample worst;
    std::string note;
};

struct CheckInfo {
    std::string id;
    std::string description;
    bool needs_v = false;
    std::vector<std::string> metric_types;
};

const std::vector<CheckInfo>& check_catalog();
bool check_applicable(const CheckInfo& info, const LoadedSpec& ls);

CheckResult run_check(const std::string& id, const LoadedSpec& ls, const CheckOptions& opt);
// Every applicable check, in catalog order.
std::vector<CheckResult> run_all_checks(const LoadedSpec& ls, const CheckOptions& opt);

// The alpha-beta weak-Einstein check on explicit data (the catalog entry
// derives alpha and beta from the spec in the constant gauge; this overload
// lets callers probe the constant-norm guard with arbitrary 1-forms).
CheckResult check_weak_einstein_ab(const RiemannMetric& alpha, const Field& beta, const Box& box,
                                   const CheckOptions& opt, const std::string& spec_id);

// Deterministic serialization (sorted keys, shortest round-trip numbers).
std::string check_results_to_json(std::span<const CheckResult> results);

bool all_passed(std::span<const CheckResult> results);

} // namespace finslernav
