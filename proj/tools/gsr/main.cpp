// gsr: command line front end (check, fmt, compile, sim, gen, instantiate,
// suggest).
//
// Exit status: 0 success, 1 diagnostics or a domain error was reported,
// 2 usage or I/O error.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "gsr/codegen.hpp"
#include "gsr/dsl.hpp"
#include "gsr/sim.hpp"
#include "gsr/validate.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kOk = 0;
constexpr int kDiagnostics = 1;
constexpr int kUsage = 2;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Reported with exit status 1.
struct Reported {};

std::string read_file(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
}

struct Options {
  std::string catalog_path;
  std::string format = "text";
};

gsr::Catalog load_catalog(const Options& opts) {
  std::string path = opts.catalog_path;
  if (path.empty()) {
    if (const char* env = std::getenv("GSR_CATALOG")) path = env;
  }
  if (path.empty()) return gsr::builtin_catalog();
  try {
    return gsr::load_catalog(read_file(path));
  } catch (const gsr::CatalogError& e) {
    for (const auto& p : e.problems()) std::cerr << "catalog:" << path << ": " << p << "\n";
    throw Reported{};
  }
}

ordered_json diagnostic_json(const gsr::Diagnostic& d) {
  return {{"severity", d.severity == gsr::Severity::Error ? "error" : "warning"},
          {"code", d.code},
          {"message", d.message},
          {"file", d.span.file},
          {"line", d.span.line},
          {"column", d.span.column}};
}

void print_diagnostics(const std::vector<gsr::Diagnostic>& diags) {
  for (const auto& d : diags) std::cerr << gsr::format_diagnostic(d) << "\n";
}

struct Checked {
  std::optional<gsr::Diagram> diagram;  // set when valid
  std::vector<gsr::Diagnostic> diagnostics;
};

Checked check_file(const std::string& path, const gsr::Catalog& catalog) {
  Checked out;
  auto parsed = gsr::parse(read_file(path), path);
  out.diagnostics = parsed.diagnostics;
  if (!parsed.ok()) return out;
  auto report = gsr::validate(*parsed.diagram, catalog, parsed.spans);
  out.diagnostics.insert(out.diagnostics.end(), report.diagnostics.begin(), report.diagnostics.end());
  if (report.is_valid()) out.diagram = std::move(parsed.diagram);
  return out;
}

// Parses and validates, printing diagnostics; throws Reported when invalid.
gsr::Diagram load_valid(const std::string& path, const gsr::Catalog& catalog) {
  auto checked = check_file(path, catalog);
  print_diagnostics(checked.diagnostics);
  if (!checked.diagram) throw Reported{};
  return std::move(*checked.diagram);
}

int cmd_check(const Options& opts, const std::string& path) {
  const auto catalog = load_catalog(opts);
  auto checked = check_file(path, catalog);
  if (opts.format == "json") {
    ordered_json j;
    j["file"] = path;
    j["valid"] = checked.diagram.has_value();
    j["diagnostics"] = ordered_json::array();
    for (const auto& d : checked.diagnostics) j["diagnostics"].push_back(diagnostic_json(d));
    std::cout << j.dump(2) << "\n";
  } else {
    print_diagnostics(checked.diagnostics);
  }
  return checked.diagram ? kOk : kDiagnostics;
}

int cmd_fmt(const std::string& path) {
  auto parsed = gsr::parse(read_file(path), path);
  print_diagnostics(parsed.diagnostics);
  if (!parsed.ok()) return kDiagnostics;
  std::cout << gsr::print(*parsed.diagram);
  return kOk;
}

int cmd_compile(const Options& opts, const std::string& path, const std::string& out) {
  const auto catalog = load_catalog(opts);
  const auto diagram = load_valid(path, catalog);
  write_output(out, gsr::net_to_json(gsr::compile(diagram, catalog)));
  return kOk;
}

gsr::BindingSet parse_bindings(const std::vector<std::string>& binds,
                               const std::vector<gsr::RequiredBinding>& required) {
  gsr::BindingSet bindings;
  for (const auto& b : binds) {
    const auto eq = b.find('=');
    if (eq == std::string::npos || eq == 0) throw CLI::ValidationError("--bind", "expected name=value, got '" + b + "'");
    const std::string name = b.substr(0, eq);
    auto it = std::find_if(required.begin(), required.end(),
                           [&](const gsr::RequiredBinding& r) { return r.name == name; });
    if (it == required.end()) throw gsr::Error("no variable named '" + name + "'");
    bindings[name] = gsr::parse_binding_value(name, std::string_view(b).substr(eq + 1), it->kind);
  }
  return bindings;
}

struct SimArgs {
  std::string net;
  std::string diagram;
  std::string script;
  std::string trace = "-";
  std::optional<std::int64_t> max_ticks;
  bool keep_running = false;
  std::vector<std::string> binds;
};

int cmd_sim(const Options& opts, const SimArgs& args) {
  gsr::Net net;
  if (!args.net.empty()) {
    net = gsr::net_from_json(read_file(args.net));
  } else {
    const auto catalog = load_catalog(opts);
    net = gsr::compile(load_valid(args.diagram, catalog), catalog);
  }
  if (!args.binds.empty() || !net.is_concrete()) {
    gsr::CommandTemplate tmpl;
    tmpl.required_bindings = gsr::required_bindings(net);
    tmpl.net_skeleton = std::move(net);
    net = gsr::instantiate(tmpl, parse_bindings(args.binds, tmpl.required_bindings));
  }
  const auto script = gsr::script_from_json(read_file(args.script));
  gsr::SimConfig config;
  config.max_ticks = args.max_ticks;
  config.stop_on_root_terminal = !args.keep_running;
  write_output(args.trace, gsr::trace_to_jsonl(gsr::run(net, script, config)));
  return kOk;
}

int cmd_gen(const Options& opts, const std::string& path, const std::string& dir) {
  const auto catalog = load_catalog(opts);
  const auto diagram = load_valid(path, catalog);
  const auto tmpl = gsr::generate(diagram, catalog);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir + "': " + ec.message());
  write_output((fs::path(dir) / "template.json").string(), gsr::template_to_json(tmpl));
  write_output((fs::path(dir) / "listing.txt").string(), tmpl.listing);
  return kOk;
}

int cmd_instantiate(const std::string& template_path, const std::vector<std::string>& binds,
                    const std::string& out) {
  const auto tmpl = gsr::template_from_json(read_file(template_path));
  write_output(out, gsr::net_to_json(gsr::instantiate(tmpl, parse_bindings(binds, tmpl.required_bindings))));
  return kOk;
}

int cmd_suggest(const Options& opts, const std::string& kind_text, const std::string& path) {
  const auto kind = gsr::parse_value_kind(kind_text);
  if (!kind) throw CLI::ValidationError("--kind", "unknown value kind '" + kind_text + "'");
  const auto catalog = load_catalog(opts);
  auto parsed = gsr::parse(read_file(path), path);
  print_diagnostics(parsed.diagnostics);
  if (!parsed.ok()) return kDiagnostics;
  const auto suggestions = gsr::suggest(catalog, *kind, *parsed.diagram);
  if (opts.format == "json") {
    ordered_json j = ordered_json::array();
    for (const auto& s : suggestions) {
      j.push_back({{"tier", static_cast<int>(s.tier)},
                   {"factory", s.factory},
                   {"receiver", s.receiver},
                   {"display", s.display}});
    }
    std::cout << j.dump(2) << "\n";
  } else {
    for (const auto& s : suggestions) std::cout << static_cast<int>(s.tier) << " " << s.display << "\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Diagram toolchain: check, compile, simulate and generate command templates"};
  app.require_subcommand(1);
  Options opts;
  app.add_option("--catalog", opts.catalog_path, "Catalog JSON (default: $GSR_CATALOG, else built-in)");
  app.add_option("--format", opts.format, "Output format for check and suggest")
      ->check(CLI::IsMember({"text", "json"}));

  std::string file;
  std::string out;

  auto* check = app.add_subcommand("check", "Parse and validate a diagram");
  check->add_option("file", file, "Diagram (.gsr)")->required();

  auto* fmt = app.add_subcommand("fmt", "Print a diagram in canonical form");
  fmt->add_option("file", file, "Diagram (.gsr)")->required();

  auto* compile = app.add_subcommand("compile", "Compile a diagram to a net");
  compile->add_option("file", file, "Diagram (.gsr)")->required();
  compile->add_option("-o,--output", out, "Net JSON (default: stdout)");

  SimArgs sim_args;
  auto* sim = app.add_subcommand("sim", "Simulate a net against a sensor script");
  auto* net_opt = sim->add_option("--net", sim_args.net, "Compiled net JSON");
  auto* diagram_opt = sim->add_option("--diagram", sim_args.diagram, "Diagram to validate and compile");
  net_opt->excludes(diagram_opt);
  sim->add_option("--script", sim_args.script, "Sensor script JSON")->required();
  sim->add_option("--trace", sim_args.trace, "Trace output (JSONL, '-' for stdout)");
  sim->add_option("--max-ticks", sim_args.max_ticks, "Tick budget (default: script length)")
      ->check(CLI::PositiveNumber);
  sim->add_option("--bind", sim_args.binds, "name=value for a diagram variable (repeatable)");
  sim->add_flag("--keep-running", sim_args.keep_running, "Do not stop when the root command ends");

  auto* gen = app.add_subcommand("gen", "Generate template.json and listing.txt");
  gen->add_option("file", file, "Diagram (.gsr)")->required();
  gen->add_option("-o,--output", out, "Output directory")->required();

  std::string template_path;
  std::vector<std::string> binds;
  auto* inst = app.add_subcommand("instantiate", "Bind template variables and emit a net");
  inst->add_option("--template", template_path, "template.json")->required();
  inst->add_option("--bind", binds, "name=value (repeatable)");
  inst->add_option("-o,--output", out, "Net JSON (default: stdout)");

  std::string kind;
  auto* suggest = app.add_subcommand("suggest", "Rank catalog factories for a value kind");
  suggest->add_option("--kind", kind, "Needed value kind")->required();
  suggest->add_option("file", file, "Diagram providing context (.gsr)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*check) return cmd_check(opts, file);
    if (*fmt) return cmd_fmt(file);
    if (*compile) return cmd_compile(opts, file, out);
    if (*sim) {
      if (sim_args.net.empty() == sim_args.diagram.empty()) {
        std::cerr << "sim: exactly one of --net or --diagram is required\n";
        return kUsage;
      }
      return cmd_sim(opts, sim_args);
    }
    if (*gen) return cmd_gen(opts, file, out);
    if (*inst) return cmd_instantiate(template_path, binds, out);
    if (*suggest) return cmd_suggest(opts, kind, file);
  } catch (const Reported&) {
    return kDiagnostics;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const gsr::MissingBinding& e) {
    std::cerr << "MissingBinding: " << e.what() << "\n";
    return kDiagnostics;
  } catch (const gsr::KindMismatch& e) {
    std::cerr << "KindMismatch: " << e.what() << "\n";
    return kDiagnostics;
  } catch (const gsr::MissingChannel& e) {
    std::cerr << "MissingChannel: " << e.what() << "\n";
    return kDiagnostics;
  } catch (const gsr::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDiagnostics;
  }
  return kUsage;
}
