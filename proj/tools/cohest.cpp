// cohest: Betti number estimation by heat-semigroup scale selection.
//
//   cohest generate   --shape circle --n 50 --noise 0.01 --seed 7 --output pts.csv
//   cohest estimate   --input pts.csv --q 1 --criterion entropy
//   cohest scan       --input pts.csv --q 1 --criterion trace --output curve.csv
//   cohest experiment experiments/table1.json
//
// Exit codes: 0 success, 2 validation error, 3 runtime/numerical error.

#include <cohest/cohest.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <string>

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

struct InputOptions
{
    std::string input;
    bool distance_matrix = false;
    int q = 1;
    std::string criterion = "entropy";
    double s = 1.0;
    std::string t0 = "250";
    double tol_rel = 1e-8;
    std::string grid = "breakpoints";
    bool include_diameter = false;
    std::size_t max_simplices = 200'000;
    std::string hs_inner = "weighted";
    unsigned jobs = 1;
    std::string output;
    std::string format;
};

void add_scan_flags(CLI::App* cmd, InputOptions& o)
{
    cmd->add_option("--input,-i", o.input, "point-cloud CSV (or distance matrix with --distance-matrix)")->required();
    cmd->add_flag("--distance-matrix", o.distance_matrix, "input is a square distance matrix");
    cmd->add_option("--q", o.q, "cohomology dimension")->capture_default_str();
    cmd->add_option("--criterion", o.criterion, "entropy | hs | trace")
        ->check(CLI::IsMember({"entropy", "hs", "trace"}))
        ->capture_default_str();
    cmd->add_option("--s", o.s, "short diffusion time")->capture_default_str();
    cmd->add_option("--t0", o.t0, "long diffusion time, or 'inf'")->capture_default_str();
    cmd->add_option("--tol-rel", o.tol_rel, "relative zero-eigenvalue tolerance")->capture_default_str();
    cmd->add_option("--grid", o.grid, "breakpoints | uniform:N | path to a CSV of scales")->capture_default_str();
    cmd->add_flag("--include-diameter", o.include_diameter, "evaluate the scale equal to the diameter too");
    cmd->add_option("--max-simplices", o.max_simplices, "skip scales with more (q+1)-simplices")
        ->capture_default_str();
    cmd->add_option("--hs-inner", o.hs_inner, "inner product for the hs criterion: weighted | standard")
        ->check(CLI::IsMember({"weighted", "standard"}))
        ->capture_default_str();
    cmd->add_option("--jobs,-j", o.jobs, "worker threads")->capture_default_str();
}

double parse_t0(const std::string& s)
{
    if (s == "inf" || s == "infinity")
        return std::numeric_limits<double>::infinity();
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size())
            throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw cohest::ValidationError("--t0 must be a number or 'inf', got '" + s + "'");
    }
}

cohest::GridSpec parse_grid_flag(const std::string& g)
{
    cohest::GridSpec grid;
    if (g == "breakpoints")
        return grid;
    if (g.rfind("uniform:", 0) == 0) {
        grid.kind = cohest::GridKind::Uniform;
        try {
            grid.points = std::stoul(g.substr(8));
        } catch (const std::exception&) {
            throw cohest::ValidationError("--grid uniform:N needs a positive integer N");
        }
        return grid;
    }
    grid.kind = cohest::GridKind::Explicit;
    const Eigen::MatrixXd v = cohest::read_numeric_csv_file(g);
    grid.values.assign(v.data(), v.data() + v.size());
    return grid;
}

cohest::ScanConfig make_scan_config(const InputOptions& o)
{
    cohest::ScanConfig cfg;
    cfg.q = o.q;
    cfg.kind = *cohest::parse_criterion(o.criterion);
    cfg.params.s = o.s;
    cfg.params.t0 = parse_t0(o.t0);
    cfg.tol.rel = o.tol_rel;
    cfg.params.kernel_tol = cfg.tol;
    cfg.grid = parse_grid_flag(o.grid);
    cfg.include_diameter = o.include_diameter;
    cfg.max_simplices = o.max_simplices;
    cfg.standard_hs = o.hs_inner == "standard";
    cfg.jobs = o.jobs;
    cfg.validate();
    return cfg;
}

cohest::DistanceMatrix load_input(const InputOptions& o)
{
    if (o.distance_matrix) {
        auto dm = cohest::read_distance_matrix(o.input);
        if (const auto bad = cohest::triangle_violations(dm); bad > 0)
            std::cerr << "warning: " << bad << " triangle-inequality violations in " << o.input << '\n';
        return dm;
    }
    return cohest::pairwise_distances(cohest::read_point_cloud(o.input));
}

/// Writes to `path`, or stdout when empty or "-".
template <typename Fn>
void with_output(const std::string& path, Fn&& fn)
{
    if (path.empty() || path == "-") {
        fn(std::cout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write '" + path + "'");
    fn(out);
    if (!out)
        throw std::runtime_error("write failed for '" + path + "'");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Betti number estimation by heat-semigroup scale selection"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "sample a synthetic point cloud to CSV");
    std::string shape = "circle";
    double radius = std::numeric_limits<double>::quiet_NaN();
    double separation = 2.0;
    double density = std::numeric_limits<double>::quiet_NaN();
    std::size_t n_points = 50;
    double noise = 0.0;
    std::uint64_t seed = 0;
    std::string gen_out;
    gen->add_option("--shape", shape, "circle | two_circles | nonuniform_circle")
        ->check(CLI::IsMember({"circle", "two_circles", "nonuniform_circle"}))
        ->capture_default_str();
    gen->add_option("--radius", radius, "circle radius (default 1, or 0.5 for two_circles)");
    gen->add_option("--separation", separation, "two_circles: distance between the circle planes")
        ->capture_default_str();
    gen->add_option("--density-param", density, "tilted-cosine density parameter in [0, 1)");
    gen->add_option("--n", n_points, "number of points")->capture_default_str();
    gen->add_option("--noise", noise, "Gaussian noise standard deviation")->capture_default_str();
    gen->add_option("--seed", seed, "random seed")->capture_default_str();
    gen->add_option("--output,-o", gen_out, "output CSV path")->required();

    // estimate / scan
    auto* est = app.add_subcommand("estimate", "estimate the q-th Betti number; ScanResult on stdout");
    InputOptions est_opts;
    est_opts.format = "json";
    std::string dump_complex;
    add_scan_flags(est, est_opts);
    est->add_option("--format", est_opts.format, "json | csv")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    est->add_option("--output,-o", est_opts.output, "write the result here instead of stdout");
    est->add_option("--dump-complex", dump_complex, "write the complex at the selected scale as JSON");

    auto* scn = app.add_subcommand("scan", "export the criterion curve D(r)");
    InputOptions scan_opts;
    scan_opts.format = "csv";
    std::string spectra_out;
    add_scan_flags(scn, scan_opts);
    scn->add_option("--format", scan_opts.format, "csv | json")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    scn->add_option("--output,-o", scan_opts.output, "curve file (default stdout)");
    scn->add_option("--spectra", spectra_out, "also write every spectrum as CSV (r, eigenvalues...)");

    // experiment
    auto* exp = app.add_subcommand("experiment", "run a Monte-Carlo experiment from a JSON spec");
    std::string spec_path;
    unsigned exp_jobs = 1;
    std::string exp_out;
    std::string exp_format = "table";
    bool timing = false;
    exp->add_option("spec", spec_path, "experiment spec (JSON)")->required();
    exp->add_option("--jobs,-j", exp_jobs, "concurrent trials")->capture_default_str();
    exp->add_option("--output,-o", exp_out, "also write the JSON report to this path");
    exp->add_option("--format", exp_format, "table | json (stdout)")
        ->check(CLI::IsMember({"table", "json"}))
        ->capture_default_str();
    exp->add_flag("--timing", timing, "include per-trial wall time in the JSON report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitValidation;
    }

    try {
        if (*gen) {
            cohest::SamplerConfig cfg;
            cfg.n_points = n_points;
            cfg.noise_sigma = noise;
            cfg.seed = seed;
            const auto or_default = [](double v, double d) { return std::isnan(v) ? d : v; };
            if (shape == "circle")
                cfg.shape = cohest::CircleShape{or_default(radius, 1.0)};
            else if (shape == "two_circles")
                cfg.shape = cohest::TwoCirclesShape{or_default(radius, 0.5), separation, or_default(density, 0.0)};
            else
                cfg.shape = cohest::NonuniformCircleShape{or_default(radius, 1.0), or_default(density, 0.9)};
            const auto pc = cohest::sample(cfg);
            cohest::write_point_cloud(gen_out, pc);
            std::cout << "wrote " << gen_out << ": n=" << pc.size() << " dim=" << pc.ambient_dim()
                      << " diameter=" << cohest::diameter(cohest::pairwise_distances(pc)) << '\n';
        } else if (*est) {
            const auto cfg = make_scan_config(est_opts);
            const auto dm = load_input(est_opts);
            const auto res = cohest::scan(dm, cfg);
            with_output(est_opts.output, [&](std::ostream& out) {
                if (est_opts.format == "json")
                    out << cohest::to_json(res).dump(2) << '\n';
                else
                    cohest::write_scan_csv(out, res);
            });
            if (!dump_complex.empty()) {
                const auto K = cohest::build_vr(dm, res.r_hat, cfg.q + 1, cfg.weight_floor);
                with_output(dump_complex, [&](std::ostream& out) { out << cohest::to_json(K).dump() << '\n'; });
            }
        } else if (*scn) {
            auto cfg = make_scan_config(scan_opts);
            cfg.keep_spectra = !spectra_out.empty();
            const auto dm = load_input(scan_opts);
            const auto res = cohest::scan(dm, cfg);
            with_output(scan_opts.output, [&](std::ostream& out) {
                if (scan_opts.format == "json")
                    out << cohest::to_json(res).dump(2) << '\n';
                else
                    cohest::write_scan_csv(out, res);
            });
            if (!spectra_out.empty())
                with_output(spectra_out, [&](std::ostream& out) { cohest::write_spectra_csv(out, res); });
        } else if (*exp) {
            std::ifstream in(spec_path);
            if (!in)
                throw cohest::ValidationError("cannot open '" + spec_path + "'");
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(in);
            } catch (const nlohmann::json::exception& e) {
                throw cohest::ValidationError(spec_path + ": " + e.what());
            }
            const auto spec = cohest::parse_experiment(j);
            const auto report = cohest::run_experiment(spec, exp_jobs);
            if (!exp_out.empty())
                with_output(exp_out, [&](std::ostream& out) { out << cohest::to_json(report, timing).dump(2) << '\n'; });
            if (exp_format == "json")
                std::cout << cohest::to_json(report, timing).dump(2) << '\n';
            else
                cohest::render_table(std::cout, report);
        }
    } catch (const cohest::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return 0;
}
