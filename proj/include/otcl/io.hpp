#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "otcl/barycenter.hpp"
#include "otcl/checks.hpp"
#include "otcl/measure.hpp"
#include "otcl/space.hpp"

namespace otcl {

using Json = nlohmann::json;

// Render with sorted keys and fixed 17-significant-digit decimals, so equal
// documents are byte-identical and doubles round-trip.
std::string dump_json_17(const Json& j);

// FNV-1a 64 over the raw bytes, as "fnv1a64:<hex>".
std::string content_hash(const std::string& bytes);
std::string file_hash(const std::filesystem::path& p);

// Write via a temp file + rename.
void atomic_write(const std::filesystem::path& p, const std::string& bytes);
std::string read_file(const std::filesystem::path& p);

// --- declared file formats ---
GroundSpace space_from_json(const Json& j);
Json space_to_json(const GroundSpace& s);

MeasureVariant measure_from_json(const Json& j);
Json measure_to_json(const MeasureVariant& m);

MixtureOmega omega_from_json(const Json& j, const GroundSpace* space_for_validation = nullptr);
Json omega_to_json(const MixtureOmega& o);

Json report_to_json(const CheckReport& rep);
CheckReport report_from_json(const Json& j);
std::string report_to_csv(const CheckReport& rep);

enum class ReportFormat { json, csv };

// Writes one report atomically; identical content yields identical bytes.
void emit_report(const CheckReport& rep, const std::filesystem::path& path, ReportFormat format);

Json barycenter_result_to_json(const BarycenterResult& r);

// Curve CSV: one row per (t, atom, weight) or per (t, mean..., cov...).
std::string curve_to_csv(const WassersteinCurve& c);

}  // namespace otcl
