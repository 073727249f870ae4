#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "colier/document/effects.hpp"
#include "colier/document/serialization.hpp"
#include "colier/raster/png_io.hpp"
#include "colier/raster/render.hpp"
#include "colier/server/net.hpp"
#include "colier/server/storage.hpp"
#include "colier/sim/sim.hpp"

namespace colier::cli {

namespace fs = std::filesystem;

namespace {

struct DocumentSource {
  doc::SessionDocument doc;
  doc::Seq seq = 0;
  fs::path assets;
};

/// A session directory (base.json + changelog), a directory holding only
/// document.json, or a document.json file.
DocumentSource open_document(const fs::path& p) {
  if (fs::is_directory(p)) {
    if (fs::exists(p / "base.json")) {
      auto s = server::load_session(p);
      return {s.document, s.log.head(), p / "assets"};
    }
    auto d = doc::load_document(server::read_file(p / "document.json"));
    return {std::move(d.doc), d.seq, p / "assets"};
  }
  if (!fs::exists(p)) throw std::runtime_error("no such document: " + p.string());
  auto d = doc::load_document(server::read_file(p));
  return {std::move(d.doc), d.seq, p.parent_path() / "assets"};
}

std::pair<doc::Millis, doc::Millis> parse_latency(const std::string& s) {
  const auto colon = s.find(':');
  auto num = [&](const std::string& t) {
    std::size_t used = 0;
    const long long v = std::stoll(t, &used);
    if (used != t.size()) throw std::invalid_argument(t);
    return static_cast<doc::Millis>(v);
  };
  try {
    if (colon == std::string::npos) {
      const auto v = num(s);
      return {v, v};
    }
    return {num(s.substr(0, colon)), num(s.substr(colon + 1))};
  } catch (const std::exception&) {
    throw CLI::ValidationError("--latency-ms", "expected MIN:MAX in milliseconds, got '" + s + "'");
  }
}

void print_summary(const DocumentSource& src, std::ostream& out) {
  const auto& d = src.doc;
  out << "name:    " << d.meta.name << "\n";
  out << "size:    " << d.meta.width << "x" << d.meta.height << "\n";
  out << "seq:     " << src.seq << "\n";
  out << "layers:  " << d.layers.size() << " (bottom to top)\n";
  for (const auto& l : d.layers) {
    std::size_t live = 0;
    for (const auto& s : l.strokes) live += !s.undone;
    out << "  " << l.id << "  \"" << l.name << "\"  opacity " << format_real(l.opacity)
        << (l.visible ? "" : "  hidden") << (l.locked ? "  locked" : "");
    if (l.exclusiveLock) out << "  exclusive:" << l.exclusiveLock->owner;
    out << "  strokes " << live << "/" << l.strokes.size();
    if (l.asset) out << "  asset " << *l.asset;
    if (!l.transform.is_identity()) {
      out << "  transform t(" << format_real(l.transform.tx) << "," << format_real(l.transform.ty) << ") r "
          << format_real(l.transform.rotation) << " s(" << format_real(l.transform.scaleX) << ","
          << format_real(l.transform.scaleY) << ")";
    }
    out << "\n";
    for (const auto& v : l.pipeline) {
      out << "      " << v.id << " " << doc::effect_name(v.effect) << (v.enabled ? "" : " (disabled)");
      for (const auto& [k, val] : v.params) out << " " << k << "=" << format_real(val);
      out << "\n";
    }
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Collaborative layered drawing: server, renderer, simulator", "colier"};
  app.require_subcommand(1);

  auto* serve = app.add_subcommand("serve", "Run the collaboration server");
  unsigned short port = 8080;
  std::string data;
  std::string address = "0.0.0.0";
  std::string webRoot;
  serve->add_option("--port", port, "TCP port, 0 picks a free one")->capture_default_str();
  serve->add_option("--data", data, "Session data directory (default: $COLIER_DATA or ./sessions)");
  serve->add_option("--address", address, "Listen address")->capture_default_str();
  serve->add_option("--web-root", webRoot, "Directory of the browser client bundle");

  auto* render = app.add_subcommand("render", "Render a document to PNG");
  std::string renderDoc, renderOut;
  render->add_option("--doc", renderDoc, "Session directory or document.json")->required();
  render->add_option("--out", renderOut, "Output PNG path")->required();

  auto* simulate = app.add_subcommand("simulate", "Run a seeded multi-client simulation");
  sim::ScenarioConfig cfg;
  std::string latency = "0:0";
  std::string report;
  std::vector<double> mix;
  simulate->add_option("--clients", cfg.clients, "Number of clients")->capture_default_str()->check(CLI::PositiveNumber);
  simulate->add_option("--ops", cfg.ops, "Total edit intents")->capture_default_str()->check(CLI::NonNegativeNumber);
  simulate->add_option("--latency-ms", latency, "Per-message delay range MIN:MAX")->capture_default_str();
  simulate->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  simulate->add_option("--mix", mix, "Weights for draw layerProp structure lock vca")->expected(5);
  simulate->add_option("--report", report, "Write the JSON report here");

  auto* inspect = app.add_subcommand("inspect", "Summarize a document");
  std::string inspectDoc;
  inspect->add_option("--doc", inspectDoc, "Session directory or document.json")->required();

  try {
    app.parse(argc, argv);
    if (simulate->parsed()) {
      std::tie(cfg.latencyMin, cfg.latencyMax) = parse_latency(latency);
      if (!mix.empty()) std::copy(mix.begin(), mix.end(), cfg.conflictMix.begin());
      try {
        cfg.validate();
      } catch (const std::invalid_argument& e) {
        throw CLI::ValidationError("simulate", e.what());
      }
    }
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "colier: " << e.what() << "\n";
    err << "run 'colier --help' for usage\n";
    return 2;
  }

  try {
    if (serve->parsed()) {
      if (data.empty()) {
        const char* env = std::getenv("COLIER_DATA");
        data = env && *env ? env : "./sessions";
      }
      server::Server core;
      std::vector<std::string> warnings;
      core.load(data, warnings);
      for (const auto& w : warnings) err << "colier: warning: " << w << "\n";
      server::NetServer net(core, server::NetOptions{address, port, webRoot, true});
      out << "colier: serving " << core.sessions().size() << " session(s) from " << core.data_dir().string()
          << " on " << address << ":" << net.port() << std::endl;
      net.run();
      out << "colier: stopped" << std::endl;
      return 0;
    }
    if (render->parsed()) {
      const DocumentSource src = open_document(renderDoc);
      raster::DirectoryAssetStore assets(src.assets);
      raster::write_png(raster::render_document(src.doc, assets), renderOut);
      out << "wrote " << renderOut << " (" << src.doc.meta.width << "x" << src.doc.meta.height << ", seq "
          << src.seq << ")\n";
      return 0;
    }
    if (simulate->parsed()) {
      const sim::ScenarioReport r = sim::run_scenario(cfg);
      const Json j = sim::report_to_json(r);
      if (!report.empty()) server::write_file_atomic(report, j.dump(2) + "\n");
      out << "converged: " << (r.converged ? "true" : "false") << "  finalSeq: " << r.finalSeq
          << "  accepted: " << r.accepted << "  rejected: " << r.rejected
          << "  orderingViolations: " << r.orderingViolations
          << "  maxPropagationMs: " << r.maxObservedPropagationMs << "\n";
      if (!r.converged) err << "colier: divergence at " << r.divergence << "\n";
      return r.converged && r.orderingViolations == 0 ? 0 : 1;
    }
    if (inspect->parsed()) {
      print_summary(open_document(inspectDoc), out);
      return 0;
    }
  } catch (const std::exception& e) {
    err << "colier: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace colier::cli
