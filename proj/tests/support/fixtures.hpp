#pragma once

#include <random>
#include <string>
#include <vector>

#include "colier/document/reducer.hpp"
#include "colier/document/types.hpp"

namespace colier::testing {

// The example drawing frame, byte for byte.
inline const std::string kExampleFrame = R"({"module": "drawing",
 "message": {
  "newPath": {
   "timeStamp": "1617804631471",
   "clientId":  "m82pY9bvAeIAAAH",
   "color":     "#795EB3",
   "width":     "10",
   "path": [["M",446.99,38],
            ["Q",447,38,448,38],
            ["Q",449,38,449.5,38],
            ["Q",450,38,451,38.5],
            ["Q",452,39,452.5,39],
            ["L",453.01,39]]}}})";

inline std::vector<doc::PathCommand> example_path() {
  using doc::PathCommand;
  return {PathCommand::move_to(446.99, 38),         PathCommand::quad_to(447, 38, 448, 38),
          PathCommand::quad_to(449, 38, 449.5, 38), PathCommand::quad_to(450, 38, 451, 38.5),
          PathCommand::quad_to(452, 39, 452.5, 39), PathCommand::line_to(453.01, 39)};
}

inline doc::ChangeMessage change(std::string client, doc::Mutation m, doc::Millis ts = 0) {
  doc::ChangeMessage c;
  c.clientId = std::move(client);
  c.timeStamp = ts;
  c.mutation = std::move(m);
  return c;
}

inline doc::ChangeMessage example_change(std::string layer = "L0") {
  doc::op::NewPath np;
  np.layerId = std::move(layer);
  np.color = *doc::Color::parse("#795EB3");
  np.width = 10;
  np.path = example_path();
  return change("m82pY9bvAeIAAAH", np, 1617804631471);
}

inline doc::Layer blank_layer(std::string id) {
  doc::Layer l;
  l.id = id;
  l.name = id;
  return l;
}

/// Document with the named layers and nothing else.
inline doc::SessionDocument doc_with_layers(std::vector<std::string> ids, int w = 800, int h = 600) {
  auto d = doc::make_document("test", w, h, 1000);
  for (auto& id : ids) d.layers.push_back(blank_layer(id));
  return d;
}

/// Random (possibly invalid or stale) change against `d`, for property tests.
/// Mixes every action; targets are drawn from live ids plus a few dead ones.
inline doc::ChangeMessage random_change(const doc::SessionDocument& d, std::mt19937_64& rng) {
  using namespace doc;
  static const std::vector<std::string> kClients = {"alice", "bob", "carol"};
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  auto real = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };

  std::string layer = "L99999999";
  if (!d.layers.empty() && pick(10) != 0) layer = d.layers[pick(d.layers.size())].id;
  std::string vca = "V99999999";
  if (const Layer* l = d.find_layer(layer); l && !l->pipeline.empty() && pick(8) != 0) {
    vca = l->pipeline[pick(l->pipeline.size())].id;
  }
  const std::string client = kClients[pick(kClients.size())];
  const auto n = static_cast<std::int64_t>(d.layers.size());

  Mutation m;
  switch (pick(16)) {
    case 0: m = op::AddLayer{}; break;
    case 1: m = op::DeleteLayer{layer}; break;
    case 2: m = op::ReorderLayer{layer, static_cast<std::int64_t>(pick(static_cast<std::size_t>(n + 1)))}; break;
    case 3: {
      op::UpdateLayer u{layer};
      switch (pick(4)) {
        case 0: u.opacity = real(-0.1, 1.1); break;
        case 1: u.visible = pick(2) == 0; break;
        case 2: u.tx = real(-50, 50); u.rotation = real(-720, 720); break;
        default: u.scaleX = real(-1, 3); u.name = "n" + std::to_string(pick(100)); break;
      }
      m = u;
      break;
    }
    case 4: m = op::Lock{layer}; break;
    case 5: m = op::Unlock{layer}; break;
    case 6: m = op::ExclusiveLock{layer}; break;
    case 7: m = op::ExclusiveUnlock{layer}; break;
    case 8: case 9: {
      op::NewPath np{layer, Color{static_cast<std::uint8_t>(pick(256)), 0x5E, 0xB3}, real(0.5, 20), {}};
      np.path.push_back(PathCommand::move_to(real(0, 800), real(0, 600)));
      for (std::size_t i = pick(5); i > 0; --i) {
        if (pick(2)) np.path.push_back(PathCommand::line_to(real(0, 800), real(0, 600)));
        else np.path.push_back(PathCommand::quad_to(real(0, 800), real(0, 600), real(0, 800), real(0, 600)));
      }
      m = np;
      break;
    }
    case 10: m = op::UndoPath{layer}; break;
    case 11: m = op::RedoPath{layer}; break;
    case 12: {
      op::AddVca a{layer, static_cast<Effect>(pick(5)), std::nullopt, {}};
      m = a;
      break;
    }
    case 13: m = op::RemoveVca{layer, vca}; break;
    case 14: {
      op::UpdateVcaParams u{layer, vca, {}};
      const char* names[] = {"amount", "blockSize", "strength", "offset", "zoom"};
      u.params[names[pick(5)]] = pick(2) ? real(0, 0.02) : std::round(real(1, 8));
      m = u;
      break;
    }
    default: m = op::SetVcaEnabled{layer, vca, pick(2) == 0}; break;
  }
  return change(client, std::move(m), static_cast<Millis>(pick(1'000'000)));
}

}  // namespace colier::testing
