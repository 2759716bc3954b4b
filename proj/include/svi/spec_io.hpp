#pragma once

#include "svi/certify.hpp"
#include "svi/core.hpp"
#include "svi/parametric.hpp"
#include "svi/setmaps.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace svi {

using Json = nlohmann::ordered_json;

struct InstanceSpec {
  InclusionInstance inst;
  std::optional<Objective> objective;
  std::optional<Box> tau_region;
  std::optional<double> alpha;
};

struct AnalysisSpec {
  std::string id;
  std::string op;
  std::string instance;
  Json params;
};

struct SpecFile {
  int version = 1;
  Settings settings;
  std::vector<InstanceSpec> instances;
  std::vector<AnalysisSpec> analyses;
  std::string input_hash;

  const InstanceSpec& instance(const std::string& id) const;
};

/// Parses and validates a spec document. Unknown fields are rejected and
/// every error names the offending field path.
SpecFile parse_spec(std::string_view text, std::optional<std::uint64_t> seed_override = std::nullopt,
                    const std::optional<Json>& tolerance_override = std::nullopt);

/// Reads the tolerance block file named by SVI_TOL_OVERRIDE, if set.
std::optional<Json> tolerance_override_from_env();

enum class OpClass { analyze, certify };
/// Throws InputError for unknown operations.
OpClass op_class(std::string_view op);

struct RunOptions {
  std::string command = "certify";  // analyze, certify or sweep
  std::vector<std::string> only;
  int jobs = 1;
  bool timings = false;
};

struct RunResult {
  Json report;
  bool violated = false;
};

RunResult run_spec(const SpecFile& spec, const RunOptions& opt);

/// Stable text form of a report: two-space indentation, trailing newline.
std::string dump_report(const Json& report);

/// CSV for one series of a report: "ID" for an analysis, "ID:THEOREM" for a
/// report inside a certification bundle. Numbers use 12 significant digits.
std::string emit_csv(const Json& report, const std::string& series);

std::string fnv1a_hex(std::string_view bytes);

Json to_json(const Vector& v);
Json to_json(const Estimate& e);
Json to_json(const CertificationReport& r);
Json to_json(const IncreaseCertificate& c);
Json to_json(const FanBound& f);
Json to_json(const ValueResult& v);
Json to_json(const ValCalmnessReport& r);
Json to_json_number(double v);

}  // namespace svi
