#include "meshcrit/run_io.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace meshcrit {

namespace fs = std::filesystem;

std::string format_exact(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string format_17(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string utc_timestamp()
{
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

fs::path output_root(const std::optional<std::string>& flag)
{
    if (flag && !flag->empty())
        return *flag;
    if (const char* env = std::getenv(kOutDirEnv); env && *env)
        return env;
    return "runs";
}

fs::path create_run_directory(const fs::path& root, const std::string& command)
{
    fs::create_directories(root);
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y%m%d-%H%M%S", &tm);
    const std::string base = std::string(stamp) + "-" + command;
    for (int k = 0; k < 10000; ++k) {
        const fs::path dir = root / (k == 0 ? base : base + "-" + std::to_string(k));
        if (fs::create_directory(dir))
            return dir;
    }
    throw std::runtime_error("create_run_directory: could not create a fresh directory under " + root.string());
}

namespace {

nlohmann::json number(double v)
{
    if (!std::isfinite(v))
        return nullptr;
    return v;
}

double number_from(const nlohmann::json& j)
{
    if (j.is_null())
        return std::numeric_limits<double>::quiet_NaN();
    return j.get<double>();
}

double parse_double(const std::string& s)
{
    if (s == "nan")
        return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf")
        return std::numeric_limits<double>::infinity();
    if (s == "-inf")
        return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw std::runtime_error("cannot parse number '" + s + "'");
    return v;
}

std::ofstream open_out(const fs::path& file)
{
    std::ofstream out(file);
    if (!out)
        throw std::runtime_error("cannot open " + file.string() + " for writing");
    return out;
}

} // namespace

nlohmann::json record_to_json(const EnergyRecord& rec)
{
    nlohmann::json j;
    j["Z"] = number(rec.Z);
    j["lambda"] = number(rec.lambda);
    j["spec"] = {{"Nx", rec.spec.nx}, {"Ny", rec.spec.ny}, {"Nz", rec.spec.nz},
                 {"hx", rec.spec.hx}, {"hy", rec.spec.hy}, {"hz", rec.spec.hz}};
    j["energy_scaled"] = number(rec.energy_scaled);
    j["energy"] = number(rec.energy);
    j["ionization"] = number(rec.ionization);
    j["residual"] = number(rec.residual);
    j["iterations"] = rec.iterations;
    j["wall_time_seconds"] = number(rec.wall_time_seconds);
    j["converged"] = rec.converged;
    j["stab_digits"] = rec.stab_digits;
    if (!rec.error.empty())
        j["error"] = rec.error;
    return j;
}

EnergyRecord record_from_json(const nlohmann::json& j)
{
    EnergyRecord rec;
    rec.Z = number_from(j.at("Z"));
    rec.lambda = number_from(j.at("lambda"));
    const auto& s = j.at("spec");
    rec.spec = {s.at("Nx").get<int>(), s.at("Ny").get<int>(), s.at("Nz").get<int>(),
                s.at("hx").get<double>(), s.at("hy").get<double>(), s.at("hz").get<double>()};
    rec.energy_scaled = number_from(j.at("energy_scaled"));
    rec.energy = number_from(j.at("energy"));
    rec.ionization = number_from(j.at("ionization"));
    rec.residual = number_from(j.at("residual"));
    rec.iterations = j.at("iterations").get<int>();
    rec.wall_time_seconds = number_from(j.at("wall_time_seconds"));
    rec.converged = j.value("converged", true);
    rec.stab_digits = j.value("stab_digits", -1);
    rec.error = j.value("error", std::string{});
    return rec;
}

void write_records_jsonl(const fs::path& file, const std::vector<EnergyRecord>& records)
{
    auto out = open_out(file);
    for (const auto& rec : records)
        out << record_to_json(rec).dump() << '\n';
}

std::vector<EnergyRecord> read_records_jsonl(const fs::path& file)
{
    std::ifstream in(file);
    if (!in)
        throw std::runtime_error("cannot open " + file.string());
    std::vector<EnergyRecord> out;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty())
            out.push_back(record_from_json(nlohmann::json::parse(line)));
    return out;
}

void write_table_csv(const fs::path& file, const std::vector<EnergyRecord>& records)
{
    auto out = open_out(file);
    out << kTableHeader << '\n';
    for (const auto& r : records) {
        out << format_17(r.Z) << ',' << format_17(r.lambda) << ',' << r.spec.nx << ',' << r.spec.ny << ','
            << r.spec.nz << ',' << format_17(r.spec.hx) << ',' << format_17(r.spec.hy) << ','
            << format_17(r.spec.hz) << ',' << format_17(r.energy) << ',' << format_17(r.ionization) << ','
            << format_17(r.residual) << ',' << r.iterations << ',' << format_17(r.wall_time_seconds) << ','
            << r.stab_digits << '\n';
    }
}

std::vector<EnergyRecord> read_table_csv(const fs::path& file)
{
    std::ifstream in(file);
    if (!in)
        throw std::runtime_error("cannot open " + file.string());
    std::string line;
    if (!std::getline(in, line) || line != kTableHeader)
        throw std::runtime_error(file.string() + ": unexpected header");
    std::vector<EnergyRecord> out;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            f.push_back(cell);
        if (f.size() != 14)
            throw std::runtime_error(file.string() + ": expected 14 columns");
        EnergyRecord r;
        r.Z = parse_double(f[0]);
        r.lambda = parse_double(f[1]);
        r.spec = {std::stoi(f[2]), std::stoi(f[3]), std::stoi(f[4]),
                  parse_double(f[5]), parse_double(f[6]), parse_double(f[7])};
        r.energy = parse_double(f[8]);
        r.ionization = parse_double(f[9]);
        r.residual = parse_double(f[10]);
        r.iterations = std::stoi(f[11]);
        r.wall_time_seconds = parse_double(f[12]);
        r.stab_digits = std::stoi(f[13]);
        out.push_back(r);
    }
    return out;
}

void write_json(const fs::path& file, const nlohmann::json& j)
{
    auto out = open_out(file);
    out << j.dump(2) << '\n';
}

} // namespace meshcrit
