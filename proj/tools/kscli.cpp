// kscli: command-line driver for the KS construction, colorability check and
// Stern-Gerlach simulations.
#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ks/gadget.hpp"
#include "ks/graph.hpp"
#include "ks/io.hpp"
#include "ks/simulator.hpp"
#include "ks/solver.hpp"

namespace fs = std::filesystem;
using namespace ks;

namespace {

struct SetOptions {
    double step_deg = 18.0;
    std::string params = "companion";
    std::optional<double> x;
    std::optional<double> y;
    bool single = false;
    double ortho_tol = kDefaultOrthogonalityTol;
    double dedup_tol = kDefaultDedupTol;
};

void add_set_options(CLI::App* cmd, SetOptions& o)
{
    cmd->add_option("--step", o.step_deg, "gadget angle and sweep step, degrees")->capture_default_str();
    cmd->add_option("--params", o.params, "companion (x = 1, y solved) or diagonal (x = y solved)")
        ->check(CLI::IsMember({"companion", "diagonal"}))
        ->capture_default_str();
    cmd->add_option("--x", o.x, "gadget parameter x (y solved for the step unless --y is given)");
    cmd->add_option("--y", o.y, "gadget parameter y");
    cmd->add_flag("--single", o.single, "use a single unrotated gadget instead of the full set");
    cmd->add_option("--ortho-tol", o.ortho_tol, "|dot| below which rays count as orthogonal")->capture_default_str();
    cmd->add_option("--dedup-tol", o.dedup_tol, "angle (rad) below which rays are merged")->capture_default_str();
}

GadgetSet gadget_for(const SetOptions& o)
{
    const double step = degrees_to_radians(o.step_deg);
    if (o.x && o.y)
        return build_gadget(*o.x, *o.y);
    if (o.x)
        return build_gadget(*o.x, solve_companion_parameter(*o.x, step));
    if (o.params == "diagonal") {
        const double t = solve_parameter_for_angle(step);
        return build_gadget(t, t);
    }
    return build_gadget(1.0, solve_companion_parameter(1.0, step));
}

RaySet ray_set_for(const SetOptions& o)
{
    const GadgetSet g = gadget_for(o);
    if (o.single)
        return single_gadget_set(g);
    const double angle = gadget_ray_angle(g);
    if (std::abs(angle - degrees_to_radians(o.step_deg)) > 1e-9)
        throw OutOfRangeError("gadget angle " + format_number(radians_to_degrees(angle)) +
                              " deg does not match the step " + format_number(o.step_deg) + " deg");
    const double step = degrees_to_radians(o.step_deg);
    return assemble_ks_set(g, RotationSchedule::standard(step), step, o.dedup_tol);
}

void write_file(const fs::path& path, const std::string& text)
{
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write " + path.string());
    out << text;
}

void emit(const std::string& text, const std::string& path)
{
    if (path.empty() || path == "-")
        std::cout << text;
    else
        write_file(path, text);
}

std::string dumped(const nlohmann::json& j) { return rounded(j).dump(2) + "\n"; }

Preparation parse_preparation(const std::string& text)
{
    if (text == "unpolarized")
        return Preparation::unprepared();
    const auto at = text.find('@');
    if (at == std::string::npos)
        throw ParseError("preparation must be up@DEG, down@DEG or unpolarized, got '" + text + "'");
    const std::string branch = text.substr(0, at);
    Sign sign;
    if (branch == "up" || branch == "+")
        sign = Sign::Plus;
    else if (branch == "down" || branch == "-")
        sign = Sign::Minus;
    else
        throw ParseError("unknown branch '" + branch + "' in preparation");
    double deg = 0.0;
    try {
        std::size_t used = 0;
        deg = std::stod(text.substr(at + 1), &used);
        if (used != text.size() - at - 1)
            throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
        throw ParseError("bad angle in preparation '" + text + "'");
    }
    return Preparation::polarized(degrees_to_radians(deg), sign);
}

std::vector<Ray3> load_rays(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    const nlohmann::json& list = j.is_object() && j.contains("rays") ? j["rays"] : j;
    if (!list.is_array())
        throw ParseError(path + ": expected an array of rays");
    std::vector<Ray3> rays;
    for (const auto& item : list) {
        const nlohmann::json& xyz = item.is_object() ? item.at("xyz") : item;
        if (!xyz.is_array() || xyz.size() != 3)
            throw ParseError(path + ": each ray needs three components");
        const std::string label = item.is_object() && item.contains("label") ? item["label"].get<std::string>() : "";
        rays.push_back(Ray3::from_vector({xyz[0].get<double>(), xyz[1].get<double>(), xyz[2].get<double>()}, label));
    }
    return rays;
}

nlohmann::json coloring_report(const RaySet& rs, const OrthogonalityGraph& g, double seconds_build)
{
    const auto t0 = std::chrono::steady_clock::now();
    const SolverVerdict verdict = check_colorability(g);
    nlohmann::json out = {{"rays", rs.rays.size()},
                          {"labeled_rays", rs.labeled.size()},
                          {"edges", g.edges.size()},
                          {"triads", g.triads.size()},
                          {"x", rs.x},
                          {"y", rs.y},
                          {"step_angle_deg", radians_to_degrees(rs.step_angle)},
                          {"verdict", to_json(verdict)}};
    if (verdict.outcome == Outcome::Unsat)
        out["certificate_replayed"] = replay_certificate(g, verdict.certificate);
    const ChainReport chain = forcing_chain_check(rs.step_angle, rs.instances, g);
    out["chain"] = to_json(chain);
    out["seconds"] = seconds_build +
                     std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

int cmd_verify_bound(std::size_t grid, double half_width, bool no_refine, bool json)
{
    const auto t0 = std::chrono::steady_clock::now();
    const BoundSearch b = minimize_gadget_cosine(grid, half_width, !no_refine);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (json) {
        nlohmann::json argmins = nlohmann::json::array();
        for (const auto& [x, y] : b.argmins)
            argmins.push_back({x, y});
        std::cout << dumped({{"grid_points", b.grid_points},
                             {"grid_min_cosine", b.grid_min_cosine},
                             {"min_cosine", b.min_cosine},
                             {"angle_deg", radians_to_degrees(b.angle)},
                             {"argmins", argmins},
                             {"sqrt8_over_3", std::sqrt(8.0) / 3.0},
                             {"seconds", seconds}});
        return 0;
    }
    std::cout << "grid " << b.grid_points << "x" << b.grid_points << " on [-" << format_number(half_width) << ", "
              << format_number(half_width) << "]^2\n";
    std::cout << "grid min cos phi    " << format_number(b.grid_min_cosine) << "\n";
    std::cout << "min cos phi         " << format_number(b.min_cosine) << "  (sqrt(8)/3 = "
              << format_number(std::sqrt(8.0) / 3.0) << ")\n";
    for (const auto& [x, y] : b.argmins)
        std::cout << "argmin              (" << format_number(x) << ", " << format_number(y) << ")\n";
    std::cout << "bound               " << format_number(radians_to_degrees(b.angle)) << " deg\n";
    return 0;
}

int cmd_build_set(const SetOptions& o, const std::string& out_dir, const std::string& census_path)
{
    const auto t0 = std::chrono::steady_clock::now();
    const RaySet rs = ray_set_for(o);
    const OrthogonalityGraph g = build_orthogonality_graph(rs, o.ortho_tol);
    const double build_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::ostringstream census;
    write_census_csv(census, rs);
    emit(census.str(), census_path);

    const nlohmann::json report = coloring_report(rs, g, build_seconds);
    const auto summary = census_summary(rs);
    std::cerr << "labeled rays " << rs.labeled.size() << ", distinct " << rs.rays.size() << ", edges "
              << g.edges.size() << ", triads " << g.triads.size() << "\n";
    std::cerr << "verdict " << report["verdict"]["outcome"].get<std::string>() << "\n";
    std::cerr << "chain: " << report["chain"]["summary"].get<std::string>() << "\n";
    if (o.single) {
        const auto pairs = enumerate_gadget_assignments(gadget_from_rays(rs.instances.front().rays, rs.x, rs.y));
        std::cerr << "admissible (nu(s0), nu(s3(3))):";
        for (const auto& [a, b] : pairs.pairs())
            std::cerr << " (" << a << "," << b << ")";
        std::cerr << "\nnu(s0) = 1 forces nu(s3(3)) = 1: " << (pairs.excludes_one_zero() ? "yes" : "no") << "\n";
        std::cerr << "nu(s3(3)) = 1 forces nu(s0) = 1: " << (pairs.excludes_zero_one() ? "yes" : "no") << "\n";
    }

    if (!out_dir.empty()) {
        const fs::path dir(out_dir);
        write_file(dir / "verdict.json", dumped(report));
        write_file(dir / "rayset.json", dumped(to_json(rs)));
        write_file(dir / "census.json", dumped(summary));
        write_file(dir / "census.csv", census.str());
        write_file(dir / "graph.dot", emit_dot(g, merged_labels(rs)));
    }
    return 0;
}

int cmd_check_coloring(const SetOptions& o, const std::string& input, double tol)
{
    OrthogonalityGraph g;
    nlohmann::json report;
    if (!input.empty()) {
        g = build_orthogonality_graph(load_rays(input), tol);
        const SolverVerdict v = check_colorability(g);
        report = {{"rays", g.node_count}, {"edges", g.edges.size()}, {"triads", g.triads.size()},
                  {"verdict", to_json(v)}};
        if (v.outcome == Outcome::Unsat)
            report["certificate_replayed"] = replay_certificate(g, v.certificate);
    } else {
        const RaySet rs = ray_set_for(o);
        g = build_orthogonality_graph(rs, tol);
        report = coloring_report(rs, g, 0.0);
    }
    report.erase("seconds");
    std::cout << dumped(report);
    return 0;
}

int cmd_verify_gadget(std::optional<double> x, std::optional<double> y, double step_deg)
{
    double gx = x.value_or(1.0);
    double gy = y ? *y : solve_companion_parameter(gx, degrees_to_radians(step_deg));
    const GadgetSet g = build_gadget(gx, gy);
    const auto t0 = std::chrono::steady_clock::now();
    const AdmissiblePairSet pairs = enumerate_gadget_assignments(g);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    nlohmann::json admissible = nlohmann::json::array();
    for (const auto& [a, b] : pairs.pairs())
        admissible.push_back({a, b});
    const double formula = gadget_angle(gx, gy);
    const double rays = gadget_ray_angle(g);
    std::cout << dumped({{"x", gx},
                         {"y", gy},
                         {"max_orthogonality_residual", max_orthogonality_residual(g)},
                         {"angle_formula_deg", radians_to_degrees(formula)},
                         {"angle_rays_deg", radians_to_degrees(rays)},
                         {"angle_difference_rad", formula - rays},
                         {"assignments", pairs.assignment_count},
                         {"admissible_pairs", admissible},
                         {"s0_forces_s33", pairs.excludes_one_zero()},
                         {"s33_forces_s0", pairs.excludes_zero_one()},
                         {"seconds", seconds},
                         {"gadget", to_json(g)}});
    return 0;
}

int cmd_tables(bool spin_half_only, bool spin1_only)
{
    if (!spin1_only) {
        write_spin_half_table(std::cout);
        if (!spin_half_only)
            std::cout << "\n";
    }
    if (!spin_half_only)
        write_spin1_table(std::cout);
    return 0;
}

int cmd_simulate(const std::string& prep, const std::vector<double>& measure_deg, std::uint64_t n,
                 std::uint64_t seed, const std::string& format, bool additivity, const std::string& out)
{
    EnsembleSpec spec{n, parse_preparation(prep), seed};
    if (additivity) {
        const AdditivityReport r = check_additivity_relation(spec, n);
        std::cerr << "seed " << seed << " generator " << kGeneratorName << "\n";
        emit(dumped(to_json(r)), out);
        return 0;
    }
    std::vector<double> angles;
    for (double d : measure_deg)
        angles.push_back(degrees_to_radians(d));
    const SequenceResult r = run_sequence(spec, angles);
    std::cerr << "seed " << seed << " generator " << kGeneratorName << "\n";
    if (format == "json") {
        auto j = to_json(r);
        for (std::size_t s = 0; s < r.stages.size(); ++s)
            j["stages"][s]["up_fraction"] =
                static_cast<double>(r.stages[s].n_plus) / static_cast<double>(r.stages[s].total);
        emit(dumped(j), out);
    } else {
        std::ostringstream csv;
        write_counts_csv(csv, r);
        emit(csv.str(), out);
    }
    return 0;
}

int cmd_vn(bool continuity, double psi_deg, std::size_t grid, const std::string& out)
{
    if (!continuity) {
        const VnAdditivityReport r = vn_value_additivity_failure();
        for (const auto& row : r.rows)
            std::cout << "(" << format_number(row.a) << ") + (" << format_number(row.b) << ") / sqrt(2) = "
                      << format_number(row.value) << (row.consistent ? "  eigenvalue" : "  not an eigenvalue") << "\n";
        std::cout << r.summary << "\n";
        return 0;
    }
    const double psi = degrees_to_radians(psi_deg);
    const auto phis = linear_grid(psi, psi + kPi, grid);
    const auto values = vn_continuity_scan(psi, phis);
    std::ostringstream csv;
    write_scan_csv(csv, psi, phis, values);
    emit(csv.str(), out);
    std::size_t inside = 0;
    for (double v : values)
        if (v > 0.0 + 1e-12 && v < 1.0 - 1e-12)
            ++inside;
    std::cerr << values.size() << " overlap values, " << inside << " strictly between 0 and 1\n";
    return 0;
}

int cmd_emit_diagram(const SetOptions& o, bool no_triads, const std::string& out)
{
    const RaySet rs = ray_set_for(o);
    const OrthogonalityGraph g = build_orthogonality_graph(rs, o.ortho_tol);
    emit(emit_dot(g, merged_labels(rs), !no_triads), out);
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Kochen-Specker construction, colorability check and Stern-Gerlach simulation"};
    app.require_subcommand(1);

    std::size_t grid = 401;
    double half_width = 2.0;
    bool no_refine = false;
    bool json = false;
    auto* verify_bound = app.add_subcommand("verify-bound", "minimize the gadget cosine over a grid");
    verify_bound->add_option("--grid", grid, "grid points per axis")->capture_default_str();
    verify_bound->add_option("--half-width", half_width, "search square [-w, w]^2")->capture_default_str();
    verify_bound->add_flag("--no-refine", no_refine, "skip the local refinement");
    verify_bound->add_flag("--json", json, "JSON output");

    SetOptions set_opts;
    std::string out_dir;
    std::string census_path;
    auto* build_set = app.add_subcommand("build-set", "assemble the ray set, print the census, check colorability");
    add_set_options(build_set, set_opts);
    build_set->add_option("--out-dir", out_dir, "write verdict.json, rayset.json, census and graph.dot here");
    build_set->add_option("--census", census_path, "census CSV path (default stdout)");

    std::string input;
    auto* check = app.add_subcommand("check-coloring", "run the colorability check and print the verdict JSON");
    add_set_options(check, set_opts);
    check->add_option("--input", input, "JSON ray list (array of [x,y,z] or a build-set rayset.json)");

    std::optional<double> gx, gy;
    double gadget_step = 18.0;
    auto* verify_gadget = app.add_subcommand("verify-gadget", "orthogonality residuals and forced pairs of one gadget");
    verify_gadget->add_option("--x", gx, "parameter x (default 1)");
    verify_gadget->add_option("--y", gy, "parameter y (default: solved for --step)");
    verify_gadget->add_option("--step", gadget_step, "target angle in degrees when y is solved")->capture_default_str();

    bool spin_half_only = false, spin1_only = false;
    auto* tables = app.add_subcommand("tables", "eigenvector tables for the four standard orientations");
    tables->add_flag("--spin-half", spin_half_only, "only the spin-1/2 table");
    tables->add_flag("--spin1", spin1_only, "only the spin-1 table");

    std::string prep = "up@0";
    std::vector<double> measure = {90.0};
    std::uint64_t n = 100000;
    std::uint64_t seed = 1;
    std::string format = "csv";
    bool additivity = false;
    std::string sim_out;
    auto* simulate = app.add_subcommand("simulate", "sequential Stern-Gerlach Monte Carlo");
    simulate->add_option("--prep", prep, "up@DEG, down@DEG or unpolarized")->capture_default_str();
    simulate->add_option("--measure", measure, "apparatus angles in degrees, in order")->delimiter(',');
    simulate->add_option("--n", n, "ensemble size")->check(CLI::Range(std::uint64_t{1}, std::uint64_t{1} << 40));
    simulate->add_option("--seed", seed, "generator seed")->capture_default_str();
    simulate->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    simulate->add_flag("--additivity", additivity, "three disjoint ensembles at 0, 45, 90 degrees");
    simulate->add_option("--out", sim_out, "output file (default stdout)");

    bool continuity = false;
    double psi = 0.0;
    std::size_t scan_grid = 181;
    std::string vn_out;
    auto* vn = app.add_subcommand("vn", "value additivity failure, or the dispersion-free continuity scan");
    vn->add_flag("--continuity", continuity, "scan <phi|W_psi|phi> from psi to psi + 180 degrees");
    vn->add_option("--psi", psi, "state angle psi in degrees")->capture_default_str();
    vn->add_option("--grid", scan_grid, "number of scan points")->check(CLI::PositiveNumber)->capture_default_str();
    vn->add_option("--out", vn_out, "CSV output file (default stdout)");

    bool no_triads = false;
    std::string dot_out;
    auto* diagram = app.add_subcommand("emit-diagram", "DOT drawing of the orthogonality graph");
    add_set_options(diagram, set_opts);
    diagram->add_flag("--no-triads", no_triads, "omit the triad comments");
    diagram->add_option("--out", dot_out, "output file (default stdout)");

    CLI11_PARSE(app, argc, argv);
    std::cout << std::setprecision(kOutputPrecision);

    try {
        if (*verify_bound)
            return cmd_verify_bound(grid, half_width, no_refine, json);
        if (*build_set)
            return cmd_build_set(set_opts, out_dir, census_path);
        if (*check)
            return cmd_check_coloring(set_opts, input, set_opts.ortho_tol);
        if (*verify_gadget)
            return cmd_verify_gadget(gx, gy, gadget_step);
        if (*tables)
            return cmd_tables(spin_half_only, spin1_only);
        if (*simulate)
            return cmd_simulate(prep, measure, n, seed, format, additivity, sim_out);
        if (*vn)
            return cmd_vn(continuity, psi, scan_grid, vn_out);
        if (*diagram)
            return cmd_emit_diagram(set_opts, no_triads, dot_out);
    } catch (const ks::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 1;
}
