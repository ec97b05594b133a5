#pragma once

#include "meshcrit/critical.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace meshcrit {

inline constexpr const char* kTableHeader =
    "Z,lambda,Nx,Ny,Nz,hx,hy,hz,energy,ionization,residual,iterations,wall_s,stab_digits";
inline constexpr const char* kOutDirEnv = "MESHCRIT_OUT_DIR";

/// Shortest decimal string that parses back to exactly `v` ("nan", "inf" for non-finite).
std::string format_exact(double v);

/// Same value with 17 significant digits, the artifact format.
std::string format_17(double v);

/// `flag` if given, else $MESHCRIT_OUT_DIR, else "runs".
std::filesystem::path output_root(const std::optional<std::string>& flag);

/// Creates root/<UTC timestamp>-<command>, adding a numeric suffix rather
/// than reusing an existing directory.
std::filesystem::path create_run_directory(const std::filesystem::path& root, const std::string& command);

nlohmann::json record_to_json(const EnergyRecord& rec);
EnergyRecord record_from_json(const nlohmann::json& j);

void write_records_jsonl(const std::filesystem::path& file, const std::vector<EnergyRecord>& records);
std::vector<EnergyRecord> read_records_jsonl(const std::filesystem::path& file);

void write_table_csv(const std::filesystem::path& file, const std::vector<EnergyRecord>& records);
std::vector<EnergyRecord> read_table_csv(const std::filesystem::path& file);

void write_json(const std::filesystem::path& file, const nlohmann::json& j);

std::string utc_timestamp();

} // namespace meshcrit
