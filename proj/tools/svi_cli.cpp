#include "svi/spec_io.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw svi::InputError("cannot open spec file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw svi::InputError("cannot write '" + path + "'");
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"svi: stability analysis of parameterized set-valued inclusions"};
  app.set_version_flag("--version", SVI_VERSION);
  app.require_subcommand(1);

  std::string spec_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  std::vector<std::string> only;
  std::string csv;
  bool timings = false;

  auto add_common = [&](CLI::App* sub, bool running) {
    sub->add_option("--spec", spec_path, "Problem spec (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "Override the spec seed");
    if (!running) return;
    sub->add_option("--out", out_path, "Report path (default: stdout)");
    sub->add_option("--jobs", jobs, "Worker threads")->check(CLI::Range(1, 64));
    sub->add_option("--only", only, "Run only this analysis id (repeatable)");
    sub->add_flag("--timings", timings, "Record wall-clock timings in the report");
  };
  CLI::App* validate = app.add_subcommand("validate", "Check a spec without running it");
  add_common(validate, false);
  CLI::App* analyze = app.add_subcommand("analyze", "Run moduli and slope analyses");
  add_common(analyze, true);
  CLI::App* certify = app.add_subcommand("certify", "Run theorem certifications");
  add_common(certify, true);
  CLI::App* sweep = app.add_subcommand("sweep", "Run all analyses and emit one CSV series");
  add_common(sweep, true);
  sweep->add_option("--csv", csv, "Series: ANALYSIS_ID or ANALYSIS_ID:THEOREM")->required();
  for (CLI::App* sub : {analyze, certify}) sub->add_option("--csv", csv, "Also write this series as CSV to stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    const svi::SpecFile spec = svi::parse_spec(read_file(spec_path), seed, svi::tolerance_override_from_env());
    if (validate->parsed()) {
      std::cout << "ok: " << spec.instances.size() << " instance(s), " << spec.analyses.size() << " analysis(es)\n";
      return 0;
    }
    svi::RunOptions opt;
    opt.command = analyze->parsed() ? "analyze" : (certify->parsed() ? "certify" : "sweep");
    opt.only = only;
    opt.jobs = jobs;
    opt.timings = timings;
    const svi::RunResult res = svi::run_spec(spec, opt);
    if (sweep->parsed()) {
      const std::string text = svi::emit_csv(res.report, csv);
      write_output(out_path, text);
    } else {
      const std::string series = csv.empty() ? std::string() : svi::emit_csv(res.report, csv);
      write_output(out_path, svi::dump_report(res.report));
      if (!series.empty()) std::cout << series;
    }
    return res.violated ? 2 : 0;
  } catch (const svi::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const svi::InstanceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
