#include "meshcrit/cli.hpp"

#include "meshcrit/critical.hpp"
#include "meshcrit/errors.hpp"
#include "meshcrit/run_io.hpp"
#include "meshcrit/selftest.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#ifndef MESHCRIT_VERSION
#define MESHCRIT_VERSION "dev"
#endif

namespace meshcrit::cli {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep))
        parts.push_back(trim(item));
    if (!s.empty() && s.back() == sep)
        parts.emplace_back();
    return parts;
}

double to_double(const std::string& s)
{
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size())
        throw std::invalid_argument("not a number: '" + s + "'");
    return v;
}

int to_int(const std::string& s)
{
    std::size_t pos = 0;
    const int v = std::stoi(s, &pos);
    if (pos != s.size())
        throw std::invalid_argument("not an integer: '" + s + "'");
    return v;
}

struct RunConfig {
    std::string command;
    std::optional<double> Z;
    std::optional<double> lambda;
    // solve / critical
    std::optional<int> nx, ny, nz;
    std::optional<double> hx, hy, hz;
    // scan (ranges)
    std::optional<std::string> nx_range, ny_range, nz_range, hx_range, hy_range, hz_range;
    double tol = 1e-12;
    int maxiter = 5000;
    double lambda_lo = 1.05;
    double lambda_hi = 1.12;
    double tol_i = 1e-11;
    double tol_lambda = 1e-13;
    int max_evals = 60;
    std::optional<std::string> out_root;
    int threads = 0;
    double perturb_weight = 0.0;
};

MeshSpec resolve_mesh(const RunConfig& c, const MeshSpec& defaults)
{
    MeshSpec s = defaults;
    if (c.nx)
        s.nx = *c.nx;
    s.ny = c.ny ? *c.ny : (c.nx ? s.nx : defaults.ny);
    if (c.nz)
        s.nz = *c.nz;
    if (c.hx)
        s.hx = *c.hx;
    s.hy = c.hy ? *c.hy : (c.hx ? s.hx : defaults.hy);
    if (c.hz)
        s.hz = *c.hz;
    validate(s);
    return s;
}

EigenOptions eigen_options(const RunConfig& c)
{
    if (!(c.tol >= 1e-14))
        throw ConfigError("--tol must be >= 1e-14");
    if (c.maxiter < 1)
        throw ConfigError("--maxiter must be >= 1");
    EigenOptions o;
    o.tol = c.tol;
    o.maxiter = c.maxiter;
    return o;
}

void put(std::ostream& os, const std::string& key, const std::string& value) { os << key << " = " << value << '\n'; }

std::string mesh_text(const MeshSpec& s)
{
    std::ostringstream os;
    os << s.nx << " x " << s.ny << " x " << s.nz << ", h = (" << format_exact(s.hx) << ", " << format_exact(s.hy)
       << ", " << format_exact(s.hz) << ")";
    return os.str();
}

struct Artifacts {
    fs::path dir;
    std::string started;
    nlohmann::json config;
    std::string config_text;
};

Artifacts begin_run(const RunConfig& c, const std::string& command)
{
    Artifacts a;
    a.dir = create_run_directory(output_root(c.out_root), command);
    a.started = utc_timestamp();
    return a;
}

void finish_run(const Artifacts& a, const std::vector<std::string>& argv, const RunConfig& c,
                const std::vector<EnergyRecord>& records, const nlohmann::json& extra)
{
    write_records_jsonl(a.dir / "records.jsonl", records);
    write_table_csv(a.dir / "results.csv", records);
    {
        std::ofstream cfg(a.dir / "config.txt");
        cfg << "# replay: meshcrit " << c.command << " --config <this file>\n" << a.config_text;
    }
    nlohmann::json meta;
    meta["command_line"] = argv;
    meta["command"] = c.command;
    meta["config"] = a.config;
    meta["version"] = std::string("meshcrit ") + MESHCRIT_VERSION;
    meta["threads"] = omp_get_max_threads();
    meta["start"] = a.started;
    meta["end"] = utc_timestamp();
    if (!extra.is_null())
        meta["result"] = extra;
    write_json(a.dir / "metadata.json", meta);
}

void snapshot_solver(const RunConfig& c, std::ostringstream& text, nlohmann::json& j)
{
    put(text, "tol", format_exact(c.tol));
    put(text, "maxiter", std::to_string(c.maxiter));
    j["tol"] = c.tol;
    j["maxiter"] = c.maxiter;
    if (c.threads > 0) {
        put(text, "threads", std::to_string(c.threads));
        j["threads"] = c.threads;
    }
}

void snapshot_mesh(const MeshSpec& s, std::ostringstream& text, nlohmann::json& j)
{
    put(text, "nx", std::to_string(s.nx));
    put(text, "ny", std::to_string(s.ny));
    put(text, "nz", std::to_string(s.nz));
    put(text, "hx", format_exact(s.hx));
    put(text, "hy", format_exact(s.hy));
    put(text, "hz", format_exact(s.hz));
    j["nx"] = s.nx;
    j["ny"] = s.ny;
    j["nz"] = s.nz;
    j["hx"] = s.hx;
    j["hy"] = s.hy;
    j["hz"] = s.hz;
}

int cmd_solve(const RunConfig& c, const std::vector<std::string>& argv, std::ostream& out)
{
    if (c.Z.has_value() == c.lambda.has_value())
        throw ConfigError("solve: give exactly one of --Z or --lambda");
    if (c.Z && !(*c.Z > 0.0))
        throw ConfigError("solve: --Z must be positive");
    if (c.lambda && !(*c.lambda >= 0.0))
        throw ConfigError("solve: --lambda must be >= 0");
    const double z_for_defaults = c.Z ? *c.Z : (*c.lambda > 0.0 ? 1.0 / *c.lambda : 1.0);
    const MeshSpec spec = resolve_mesh(c, default_mesh(z_for_defaults));
    const EigenOptions eig = eigen_options(c);

    Artifacts art = begin_run(c, "solve");
    std::ostringstream text;
    if (c.Z) {
        put(text, "Z", format_exact(*c.Z));
        art.config["Z"] = *c.Z;
    } else {
        put(text, "lambda", format_exact(*c.lambda));
        art.config["lambda"] = *c.lambda;
    }
    snapshot_mesh(spec, text, art.config);
    snapshot_solver(c, text, art.config);
    art.config_text = text.str();

    const EnergyRecord rec = c.Z ? ground_state_energy(spec, *c.Z, nullptr, eig)
                                 : ground_state_energy_scaled(spec, *c.lambda, nullptr, eig);

    out << "mesh        " << mesh_text(spec) << '\n';
    out << "Z           " << format_exact(rec.Z) << '\n';
    out << "lambda      " << format_exact(rec.lambda) << '\n';
    out << "E_scaled    " << format_exact(rec.energy_scaled) << '\n';
    out << "E           " << format_exact(rec.energy) << '\n';
    out << "I           " << format_exact(rec.ionization) << '\n';
    out << "residual    " << format_exact(rec.residual) << '\n';
    out << "iterations  " << rec.iterations << '\n';
    out << "converged   " << (rec.converged ? "yes" : "no") << '\n';
    out << "wall_s      " << format_exact(rec.wall_time_seconds) << '\n';
    out << "run_dir     " << art.dir.string() << '\n';

    finish_run(art, argv, c, {rec}, nullptr);
    return rec.converged ? kOk : kNotConverged;
}

int cmd_critical(const RunConfig& c, const std::vector<std::string>& argv, std::ostream& out)
{
    const MeshSpec spec = resolve_mesh(c, default_mesh(kReferenceCriticalCharge));
    const EigenOptions eig = eigen_options(c);
    if (!(c.lambda_lo > 0.0) || !(c.lambda_lo < c.lambda_hi))
        throw ConfigError("critical: bracket must satisfy 0 < lambda-lo < lambda-hi");
    if (!(c.tol_i >= 1e-12))
        throw ConfigError("critical: --tol-i must be >= 1e-12");
    if (!(c.tol_lambda > 0.0) || c.max_evals < 3)
        throw ConfigError("critical: --tol-lambda must be positive and --max-evals >= 3");

    CriticalOptions opt;
    opt.lambda_lo = c.lambda_lo;
    opt.lambda_hi = c.lambda_hi;
    opt.tol_ionization = c.tol_i;
    opt.tol_lambda = c.tol_lambda;
    opt.max_evaluations = c.max_evals;

    Artifacts art = begin_run(c, "critical");
    std::ostringstream text;
    snapshot_mesh(spec, text, art.config);
    put(text, "lambda-lo", format_exact(c.lambda_lo));
    put(text, "lambda-hi", format_exact(c.lambda_hi));
    put(text, "tol-i", format_exact(c.tol_i));
    put(text, "tol-lambda", format_exact(c.tol_lambda));
    put(text, "max-evals", std::to_string(c.max_evals));
    art.config["lambda_lo"] = c.lambda_lo;
    art.config["lambda_hi"] = c.lambda_hi;
    art.config["tol_i"] = c.tol_i;
    art.config["tol_lambda"] = c.tol_lambda;
    art.config["max_evals"] = c.max_evals;
    snapshot_solver(c, text, art.config);
    art.config_text = text.str();

    // History is persisted as one record per evaluation.
    std::vector<EnergyRecord> records;
    WarmStartPool pool;
    ScaledEnergyFunction energy = [&](double lambda) {
        StateVector next;
        EnergyRecord rec = ground_state_energy_scaled(spec, lambda, pool.nearest(lambda), eig, &next);
        if (rec.converged)
            pool.add(lambda, std::move(next));
        records.push_back(rec);
        out << "  lambda " << format_exact(lambda) << "  E_scaled " << format_exact(rec.energy_scaled) << "  g "
            << format_exact(rec.energy_scaled + 0.5) << "  iterations " << rec.iterations << '\n';
        out.flush();
        return CriticalEvaluation{lambda, rec.energy_scaled, rec.residual, rec.iterations, rec.converged};
    };

    CriticalResult res;
    try {
        res = find_critical_charge(energy, opt);
    } catch (const BracketError&) {
        finish_run(art, argv, c, records, nlohmann::json{{"error", "no sign change on bracket"}});
        throw;
    }
    res.spec = spec;

    out << "Z_cr        " << format_exact(res.z_critical) << '\n';
    out << "lambda_cr   " << format_exact(res.lambda_critical) << '\n';
    out << "E(Z_cr)     " << format_exact(res.energy) << '\n';
    out << "E_th        " << format_exact(res.threshold_energy) << '\n';
    out << "|I|         " << format_exact(std::abs(res.final_ionization)) << '\n';
    out << "evaluations " << res.history.size() << '\n';
    out << "converged   " << (res.converged && !res.solver_failed ? "yes" : "no") << '\n';
    out << "run_dir     " << art.dir.string() << '\n';

    nlohmann::json summary{{"z_critical", res.z_critical},
                           {"lambda_critical", res.lambda_critical},
                           {"energy", res.energy},
                           {"energy_scaled", res.energy_scaled},
                           {"final_ionization", res.final_ionization},
                           {"threshold_energy", res.threshold_energy},
                           {"evaluations", res.history.size()},
                           {"converged", res.converged},
                           {"solver_failed", res.solver_failed}};
    write_json(art.dir / "critical.json", summary);
    finish_run(art, argv, c, records, summary);
    return (res.converged && !res.solver_failed) ? kOk : kNotConverged;
}

int cmd_scan(const RunConfig& c, const std::vector<std::string>& argv, std::ostream& out)
{
    if (c.Z.has_value() == c.lambda.has_value())
        throw ConfigError("scan: give exactly one of --Z or --lambda");
    const double Z = c.Z ? *c.Z : (*c.lambda > 0.0 ? 1.0 / *c.lambda : 0.0);
    if (!(Z > 0.0))
        throw ConfigError("scan: Z must be positive");
    const MeshSpec defaults = default_mesh(Z);
    const EigenOptions eig = eigen_options(c);

    auto ints = [](const std::optional<std::string>& r, int fallback) {
        return r ? parse_int_range(*r) : std::vector<int>{fallback};
    };
    auto reals = [](const std::optional<std::string>& r, double fallback) {
        return r ? parse_real_range(*r) : std::vector<double>{fallback};
    };
    const auto nxs = ints(c.nx_range, defaults.nx);
    const auto nzs = ints(c.nz_range, defaults.nz);
    const auto hxs = reals(c.hx_range, defaults.hx);
    const auto hzs = reals(c.hz_range, defaults.hz);

    std::vector<std::array<int, 3>> sizes;
    for (int nx : nxs) {
        const auto nys = c.ny_range ? parse_int_range(*c.ny_range) : std::vector<int>{c.nx_range ? nx : defaults.ny};
        for (int ny : nys)
            for (int nz : nzs) {
                validate(MeshSpec{nx, ny, nz, 1, 1, 1});
                sizes.push_back({nx, ny, nz});
            }
    }
    std::vector<std::array<double, 3>> scales;
    for (double hx : hxs) {
        const auto hys = c.hy_range ? parse_real_range(*c.hy_range) : std::vector<double>{c.hx_range ? hx : defaults.hy};
        for (double hy : hys)
            for (double hz : hzs) {
                validate(MeshSpec{1, 1, 1, hx, hy, hz});
                scales.push_back({hx, hy, hz});
            }
    }

    Artifacts art = begin_run(c, "scan");
    std::ostringstream text;
    if (c.Z) {
        put(text, "Z", format_exact(*c.Z));
        art.config["Z"] = *c.Z;
    } else {
        put(text, "lambda", format_exact(*c.lambda));
        art.config["lambda"] = *c.lambda;
    }
    auto range_or = [&](const char* key, const std::optional<std::string>& r, const std::string& fallback) {
        const std::string v = r ? *r : fallback;
        put(text, key, v);
        art.config[key] = v;
    };
    range_or("nx", c.nx_range, std::to_string(defaults.nx));
    if (c.ny_range)
        range_or("ny", c.ny_range, "");
    range_or("nz", c.nz_range, std::to_string(defaults.nz));
    range_or("hx", c.hx_range, format_exact(defaults.hx));
    if (c.hy_range)
        range_or("hy", c.hy_range, "");
    range_or("hz", c.hz_range, format_exact(defaults.hz));
    snapshot_solver(c, text, art.config);
    art.config_text = text.str();

    const auto records = convergence_scan(Z, sizes, scales, eig);

    out << kTableHeader << '\n';
    bool all_ok = true;
    for (const auto& r : records) {
        out << format_exact(r.Z) << ',' << format_exact(r.lambda) << ',' << r.spec.nx << ',' << r.spec.ny << ','
            << r.spec.nz << ',' << format_exact(r.spec.hx) << ',' << format_exact(r.spec.hy) << ','
            << format_exact(r.spec.hz) << ',' << format_exact(r.energy) << ',' << format_exact(r.ionization) << ','
            << format_exact(r.residual) << ',' << r.iterations << ',' << format_exact(r.wall_time_seconds) << ','
            << r.stab_digits;
        if (!r.converged) {
            out << "  # FLAGGED" << (r.error.empty() ? " not converged" : " " + r.error);
            all_ok = false;
        }
        out << '\n';
    }
    out << "run_dir " << art.dir.string() << '\n';
    finish_run(art, argv, c, records, nullptr);
    return all_ok ? kOk : kNotConverged;
}

int cmd_selftest(const RunConfig& c, std::ostream& out)
{
    SelftestOptions opt;
    opt.perturb_weight = c.perturb_weight;
    const auto results = run_selftest(opt);
    bool ok = true;
    for (const auto& r : results) {
        out << (r.passed ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.detail << '\n';
        ok = ok && r.passed;
    }
    return ok ? kOk : kNotConverged;
}

} // namespace

std::vector<int> parse_int_range(const std::string& text)
{
    const auto parts = split(trim(text), ':');
    std::vector<int> out;
    if (parts.size() == 1) {
        out.push_back(to_int(parts[0]));
        return out;
    }
    if (parts.size() != 3)
        throw std::invalid_argument("range must be start:stop:step, got '" + text + "'");
    const int start = to_int(parts[0]), stop = to_int(parts[1]), step = to_int(parts[2]);
    if (step <= 0)
        throw std::invalid_argument("range step must be positive in '" + text + "'");
    for (int v = start; v <= stop; v += step)
        out.push_back(v);
    if (out.empty())
        throw std::invalid_argument("empty range '" + text + "'");
    return out;
}

std::vector<double> parse_real_range(const std::string& text)
{
    const auto parts = split(trim(text), ':');
    std::vector<double> out;
    if (parts.size() == 1) {
        out.push_back(to_double(parts[0]));
        return out;
    }
    if (parts.size() != 3)
        throw std::invalid_argument("range must be start:stop:step, got '" + text + "'");
    const double start = to_double(parts[0]), stop = to_double(parts[1]), step = to_double(parts[2]);
    if (!(step > 0.0))
        throw std::invalid_argument("range step must be positive in '" + text + "'");
    if (start > stop)
        throw std::invalid_argument("empty range '" + text + "'");
    const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9));
    for (long k = 0; k <= count; ++k)
        out.push_back(start + static_cast<double>(k) * step);
    return out;
}

std::vector<std::string> read_config_args(const fs::path& file)
{
    std::ifstream in(file);
    if (!in)
        throw ConfigError("cannot read config file " + file.string());
    std::vector<std::string> args;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(file.string() + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError(file.string() + ":" + std::to_string(lineno) + ": empty key");
        args.push_back("--" + key);
        args.push_back(value);
    }
    return args;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    std::vector<std::string> full_cmdline(argv, argv + argc);

    RunConfig c;
    CLI::App app{"Ground-state energies and the critical charge of the (Z, e, e) ion on a Lagrange-Laguerre mesh",
                 "meshcrit"};
    app.set_version_flag("--version", std::string("meshcrit ") + MESHCRIT_VERSION);
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    std::string config_file;
    auto add_common = [&](CLI::App* sub) {
        sub->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        sub->add_option("--config", config_file, "flat key = value file; flags override it");
        sub->add_option("--out-root", c.out_root, "output root (default $MESHCRIT_OUT_DIR or ./runs)");
        sub->add_option("--threads", c.threads, "OpenMP worker count")->check(CLI::NonNegativeNumber);
        sub->add_option("--tol", c.tol, "eigensolver residual tolerance");
        sub->add_option("--maxiter", c.maxiter, "eigensolver iteration limit");
    };
    auto add_mesh = [&](CLI::App* sub) {
        sub->add_option("--nx", c.nx, "mesh points along x");
        sub->add_option("--ny", c.ny, "mesh points along y (default: nx)");
        sub->add_option("--nz", c.nz, "mesh points along z");
        sub->add_option("--hx", c.hx, "scale along x");
        sub->add_option("--hy", c.hy, "scale along y (default: hx)");
        sub->add_option("--hz", c.hz, "scale along z");
    };

    auto* solve = app.add_subcommand("solve", "ground-state energy for one Z (or lambda)");
    add_common(solve);
    add_mesh(solve);
    auto* zopt = solve->add_option("--Z", c.Z, "nuclear charge");
    solve->add_option("--lambda", c.lambda, "interelectron coupling 1/Z of the scaled form")->excludes(zopt);

    auto* scan = app.add_subcommand("scan", "convergence scan over mesh sizes and scales");
    add_common(scan);
    auto* szopt = scan->add_option("--Z", c.Z, "nuclear charge");
    scan->add_option("--lambda", c.lambda, "1/Z")->excludes(szopt);
    scan->add_option("--nx", c.nx_range, "start:stop:step or value");
    scan->add_option("--ny", c.ny_range, "start:stop:step or value (default: follows nx)");
    scan->add_option("--nz", c.nz_range, "start:stop:step or value");
    scan->add_option("--hx", c.hx_range, "start:stop:step or value");
    scan->add_option("--hy", c.hy_range, "start:stop:step or value (default: follows hx)");
    scan->add_option("--hz", c.hz_range, "start:stop:step or value");

    auto* critical = app.add_subcommand("critical", "locate Z_cr where E + Z^2/2 vanishes");
    add_common(critical);
    add_mesh(critical);
    critical->add_option("--lambda-lo", c.lambda_lo, "lower end of the lambda bracket");
    critical->add_option("--lambda-hi", c.lambda_hi, "upper end of the lambda bracket");
    critical->add_option("--tol-i", c.tol_i, "stop when |E~ + 1/2| is below this");
    critical->add_option("--tol-lambda", c.tol_lambda, "stop when the bracket is narrower than this");
    critical->add_option("--max-evals", c.max_evals, "eigen-solve budget");

    auto* selftest = app.add_subcommand("selftest", "run the built-in property suites");
    selftest->add_option("--perturb-weight", c.perturb_weight)->group("");  // debug hook

    // Splice config-file arguments right after the subcommand so that
    // command-line flags, which come later, take precedence.
    for (std::size_t i = 0; i < args.size(); ++i) {
        std::string file;
        if (args[i] == "--config" && i + 1 < args.size())
            file = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0)
            file = args[i].substr(9);
        if (file.empty())
            continue;
        try {
            const auto extra = read_config_args(file);
            const auto sub = std::find_if(args.begin(), args.end(),
                                          [](const std::string& a) { return !a.empty() && a[0] != '-'; });
            const auto pos = sub == args.end() ? args.begin() : sub + 1;
            args.insert(pos, extra.begin(), extra.end());
        } catch (const std::exception& e) {
            err << "error: " << e.what() << '\n';
            return kUsage;
        }
        break;
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::CallForVersion&) {
        out << "meshcrit " << MESHCRIT_VERSION << '\n';
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kUsage;
    }

    if (c.threads > 0)
        omp_set_num_threads(c.threads);

    try {
        if (solve->parsed()) {
            c.command = "solve";
            return cmd_solve(c, full_cmdline, out);
        }
        if (scan->parsed()) {
            c.command = "scan";
            return cmd_scan(c, full_cmdline, out);
        }
        if (critical->parsed()) {
            c.command = "critical";
            return cmd_critical(c, full_cmdline, out);
        }
        c.command = "selftest";
        return cmd_selftest(c, out);
    } catch (const BracketError& e) {
        err << "error: " << e.what() << '\n';
        return kNoSignChange;
    } catch (const NumericError& e) {
        err << "numeric failure: " << e.what() << '\n';
        return kNumericFailure;
    } catch (const std::invalid_argument& e) {  // includes ConfigError
        err << "error: " << e.what() << "\n\n" << app.help();
        return kUsage;
    } catch (const std::out_of_range& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kUsage;
    } catch (const std::exception& e) {
        err << "failure: " << e.what() << '\n';
        return kNumericFailure;
    }
}

} // namespace meshcrit::cli
