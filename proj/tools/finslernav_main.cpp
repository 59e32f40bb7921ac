// Batch front door: read chart specs, run curvature reports, navigation
// transforms, field checks, and the property-check harness; emit
// deterministic JSON/CSV reports.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "finslernav/fields.hpp"
#include "finslernav/modelspaces.hpp"
#include "finslernav/navigation.hpp"
#include "finslernav/parallel.hpp"
#include "finslernav/verify.hpp"

namespace {

using namespace finslernav;
using nlohmann::json;

constexpr int kExitPass = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitInputError = 2;

void write_output(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw SpecError("cannot open output file: " + out_path);
    out << text;
}

Vecd parse_csv_numbers(const std::string& text, int expect, const char* what) {
    Vecd out;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            out.push_back(std::stod(cell));
        } catch (const std::exception&) {
            throw SpecError(std::string("cannot parse ") + what + " component '" + cell + "'");
        }
    }
    if (static_cast<int>(out.size()) != expect)
        throw SpecError(std::string(what) + " needs " + std::to_string(expect) + " components");
    return out;
}

std::string known_models() {
    std::string s;
    for (const std::string& name : model_names()) {
        if (!s.empty()) s += ", ";
        s += name;
    }
    return s;
}

LoadedSpec load_from(const std::string& spec_path, const std::string& model_name) {
    if (!model_name.empty() && !spec_path.empty())
        throw SpecError("give either a spec file or --model, not both");
    if (!model_name.empty()) {
        try {
            return load_model(model_name);
        } catch (const SpecError&) {
            throw SpecError("unknown model '" + model_name + "' (known: " + known_models() + ")");
        }
    }
    if (spec_path.empty()) throw SpecError("a spec file or --model is required");
    return load_spec_file(spec_path);
}

json report_to_json(const CurvatureReport& rep) {
    json o;
    o["x"] = rep.x;
    o["y"] = rep.y;
    o["F"] = rep.F;
    o["S"] = rep.S;
    o["Ric"] = rep.Ric;
    json g = json::array(), R = json::array();
    for (int i = 0; i < rep.g.rows(); ++i) {
        json grow = json::array(), rrow = json::array();
        for (int j = 0; j < rep.g.cols(); ++j) {
            grow.push_back(rep.g(i, j));
            rrow.push_back(rep.R(i, j));
        }
        g.push_back(grow);
        R.push_back(rrow);
    }
    o["g"] = g;
    o["R"] = R;
    o["G"] = rep.G;
    o["K"] = rep.flag_values;
    o["res_homogeneity"] = rep.res_homogeneity;
    o["res_ry"] = rep.res_ry;
    o["res_scalar_flag"] = rep.res_scalar_flag;
    return o;
}

std::string reports_to_csv(const std::vector<CurvatureReport>& reports) {
    if (reports.empty()) return "";
    const int n = static_cast<int>(reports.front().x.size());
    const int flags = static_cast<int>(reports.front().flag_values.size());
    std::string out;
    out += "sample";
    for (int i = 1; i <= n; ++i) out += ",x" + std::to_string(i);
    for (int i = 1; i <= n; ++i) out += ",y" + std::to_string(i);
    out += ",F,S,Ric";
    for (int k = 1; k <= flags; ++k) out += ",K" + std::to_string(k);
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j) out += ",g" + std::to_string(i) + std::to_string(j);
    for (int i = 1; i <= n; ++i) out += ",G" + std::to_string(i);
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j) out += ",R" + std::to_string(i) + std::to_string(j);
    out += ",res_homogeneity,res_ry,res_scalar_flag\n";
    for (std::size_t s = 0; s < reports.size(); ++s) {
        const CurvatureReport& r = reports[s];
        out += std::to_string(s);
        for (double v : r.x) out += "," + format_double(v);
        for (double v : r.y) out += "," + format_double(v);
        out += "," + format_double(r.F) + "," + format_double(r.S) + "," + format_double(r.Ric);
        for (double v : r.flag_values) out += "," + format_double(v);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) out += "," + format_double(r.g(i, j));
        for (double v : r.G) out += "," + format_double(v);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) out += "," + format_double(r.R(i, j));
        out += "," + format_double(r.res_homogeneity) + "," + format_double(r.res_ry) + "," +
               format_double(r.res_scalar_flag) + "\n";
    }
    return out;
}

int cmd_curvature(const std::string& spec_path, const std::string& point_csv,
                  const std::string& dir_csv, int samples, std::uint64_t seed, int flags,
                  const std::string& out_path, const std::string& format) {
    LoadedSpec ls = load_spec_file(spec_path);
    std::vector<CurvatureReport> reports;
    CounterRng rng(seed);

    if (!point_csv.empty() || !dir_csv.empty()) {
        if (point_csv.empty() || dir_csv.empty())
            throw SpecError("--point and --dir must be given together");
        Vecd x = parse_csv_numbers(point_csv, ls.raw.dim, "--point");
        Vecd y = parse_csv_numbers(dir_csv, ls.raw.dim, "--dir");
        SampleStream flag_stream(rng, 0);
        reports.push_back(curvature_report(ls.metric, x, y, flag_stream, flags));
    } else {
        reports.resize(static_cast<std::size_t>(samples));
        std::vector<char> ok(static_cast<std::size_t>(samples), 0);
        parallel_for(samples, [&](int i) {
            SampleStream stream(rng, static_cast<std::uint64_t>(i));
            Vecd x;
            for (int attempt = 0; attempt < 64; ++attempt) {
                x = stream.box_point(ls.box);
                if (!ls.h.guard || ls.h.guard->eval_d(x, ls.h.params) > 0.0) break;
                x.clear();
            }
            if (x.empty()) return;
            Vecd y = sample_admissible_direction(ls.metric, x, stream);
            reports[static_cast<std::size_t>(i)] = curvature_report(ls.metric, x, y, stream, flags);
            ok[static_cast<std::size_t>(i)] = 1;
        });
        std::vector<CurvatureReport> kept;
        for (std::size_t i = 0; i < reports.size(); ++i)
            if (ok[i]) kept.push_back(std::move(reports[i]));
        reports = std::move(kept);
    }

    if (format == "csv") {
        write_output(reports_to_csv(reports), out_path);
    } else {
        json arr = json::array();
        for (const CurvatureReport& r : reports) arr.push_back(report_to_json(r));
        write_output(arr.dump(2) + "\n", out_path);
    }
    return kExitPass;
}

int cmd_navigate(const std::string& spec_path, const std::string& out_path,
                 const std::string& emit_spec_path) {
    LoadedSpec ls = load_spec_file(spec_path);
    if (!ls.V) throw SpecError("the spec provides no V field to navigate with");
    if (ls.resolved_type != "kropina")
        throw SpecError("navigation with a second wind starts from a critical metric");
    CompositeResult res = composite(ls.metric, *ls.V);

    ManifoldSpec out_spec = ls.raw;
    out_spec.V.reset();
    out_spec.metric_type = res.classification == MetricKind::Randers ? "randers" : "kropina";
    out_spec.W.clear();
    for (const Expr& e : res.wind_sum.comp) out_spec.W.push_back(print(e));

    json o;
    o["classification"] = out_spec.metric_type;
    o["lambda_tilde"] = print(res.lambda_tilde);
    o["s_range"] = json::array({res.min_s, res.max_s});
    o["max_speed_of_reversed_wind"] = res.max_speed;
    o["samples_checked"] = res.samples_checked;
    o["output_spec"] = json::parse(manifold_spec_to_json_text(out_spec));
    write_output(o.dump(2) + "\n", out_path);

    if (!emit_spec_path.empty()) write_manifold_spec(out_spec, emit_spec_path);
    return kExitPass;
}

int cmd_check_fields(const std::string& spec_path, int samples, std::uint64_t seed,
                     const std::string& out_path) {
    LoadedSpec ls = load_spec_file(spec_path);
    if (!ls.V) throw SpecError("the spec provides no V field to analyze");
    CounterRng rng(seed);
    std::vector<Vecd> pts;
    for (int i = 0; pts.size() < static_cast<std::size_t>(samples) && i < 64 * samples; ++i) {
        SampleStream s(rng, static_cast<std::uint64_t>(i));
        Vecd x = s.box_point(ls.box);
        if (ls.h.guard && !(ls.h.guard->eval_d(x, ls.h.params) > 0.0)) continue;
        pts.push_back(std::move(x));
    }
    FieldReport rep = ls.resolved_type == "kropina"
                          ? check_conformal_kropina(ls.h, ls.W, *ls.V, pts)
                          : check_conformal_riemann(ls.h, *ls.V, pts);
    json o;
    o["spec"] = ls.id;
    o["samples"] = static_cast<int>(pts.size());
    o["seed"] = seed;
    o["verdict"] = to_string(rep.verdict);
    o["residual_c1"] = rep.residual_c1;
    if (rep.used_wind_condition) o["residual_c2"] = rep.residual_c2;
    o["residual_killing"] = rep.residual_killing;
    o["rho_mean"] = rep.rho_mean;
    o["rho_stdev"] = rep.rho_stdev;
    o["rho_hat"] = rep.rho_hat;
    json sample_list = json::array();
    for (const Vecd& x : rep.samples) sample_list.push_back(x);
    o["sample_points"] = sample_list;
    write_output(o.dump(2) + "\n", out_path);
    return kExitPass;
}

int cmd_verify(const std::string& spec_path, const std::string& model_name,
               const std::string& check_id, int samples, std::uint64_t seed, double tol_h,
               double tol_c, const std::string& out_path) {
    LoadedSpec ls = load_from(spec_path, model_name);
    CheckOptions opt;
    opt.samples = samples;
    opt.seed = seed;
    opt.tol_h = tol_h;
    opt.tol_c = tol_c;

    std::vector<CheckResult> results;
    if (check_id == "all") {
        results = run_all_checks(ls, opt);
    } else {
        bool known = false;
        for (const CheckInfo& info : check_catalog()) known = known || info.id == check_id;
        if (!known) {
            std::string ids;
            for (const CheckInfo& info : check_catalog()) {
                if (!ids.empty()) ids += ", ";
                ids += info.id;
            }
            throw SpecError("unknown check '" + check_id + "' (known: all, " + ids + ")");
        }
        results.push_back(run_check(check_id, ls, opt));
    }
    write_output(check_results_to_json(results), out_path);
    return all_passed(results) ? kExitPass : kExitCheckFailure;
}

int cmd_export_model(const std::string& model_name, const std::string& out_path) {
    try {
        const ModelSpace& ms = model(model_name);
        write_manifold_spec(ms.spec, out_path);
    } catch (const SpecError&) {
        throw SpecError("unknown model '" + model_name + "' (known: " + known_models() + ")");
    }
    return kExitPass;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical toolkit for navigation-data Finsler metrics"};
    app.require_subcommand(1);

    std::string spec_path, point_csv, dir_csv, out_path, format = "json";
    std::string model_name, check_id = "all", emit_spec_path;
    int samples = 20;
    int flags = 3;
    std::uint64_t seed = 42;
    double tol_h = 1e-7, tol_c = 1e-5;

    CLI::App* curvature = app.add_subcommand("curvature", "curvature report at points of a spec");
    curvature->add_option("spec", spec_path, "spec JSON file")->required();
    curvature->add_option("--point", point_csv, "evaluation point (comma-separated)");
    curvature->add_option("--dir", dir_csv, "tangent direction (comma-separated)");
    curvature->add_option("--samples", samples, "number of sampled points");
    curvature->add_option("--seed", seed, "sampling seed");
    curvature->add_option("--flags", flags, "flag edges per sample");
    curvature->add_option("--out", out_path, "output path (default stdout)");
    curvature->add_option("--format", format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));

    CLI::App* navigate = app.add_subcommand("navigate", "navigation with the spec's V field");
    navigate->add_option("spec", spec_path, "spec JSON file with V")->required();
    navigate->add_option("--out", out_path, "result path (default stdout)");
    navigate->add_option("--emit-spec", emit_spec_path, "write the produced metric as a spec");

    CLI::App* fields = app.add_subcommand("check-fields", "conformal/Killing analysis of V");
    fields->add_option("spec", spec_path, "spec JSON file with V")->required();
    fields->add_option("--samples", samples, "number of sampled points");
    fields->add_option("--seed", seed, "sampling seed");
    fields->add_option("--out", out_path, "output path (default stdout)");

    CLI::App* verify = app.add_subcommand("verify", "run property checks");
    verify->add_option("spec", spec_path, "spec JSON file");
    verify->add_option("--model", model_name, "built-in model name");
    verify->add_option("--check", check_id, "check id or 'all'");
    verify->add_option("--samples", samples, "sample points per check");
    verify->add_option("--seed", seed, "sampling seed");
    verify->add_option("--tol-h", tol_h, "hypothesis tolerance");
    verify->add_option("--tol-c", tol_c, "conclusion tolerance");
    verify->add_option("--out", out_path, "output path (default stdout)");

    CLI::App* export_model = app.add_subcommand("export-model", "write a built-in model spec");
    export_model->add_option("--model", model_name, "built-in model name")->required();
    export_model->add_option("--out", out_path, "output spec path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitPass : kExitInputError;
    }

    try {
        if (curvature->parsed())
            return cmd_curvature(spec_path, point_csv, dir_csv, samples, seed, flags, out_path,
                                 format);
        if (navigate->parsed()) return cmd_navigate(spec_path, out_path, emit_spec_path);
        if (fields->parsed()) return cmd_check_fields(spec_path, samples, seed, out_path);
        if (verify->parsed())
            return cmd_verify(spec_path, model_name, check_id, samples, seed, tol_h, tol_c,
                              out_path);
        if (export_model->parsed()) return cmd_export_model(model_name, out_path);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitInputError;
}
