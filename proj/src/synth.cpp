// Copyright 2026 The semood Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "semood/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "semood/rng.hpp"

namespace semood {

namespace {

struct Point {
  double x;
  double y;
};
using Polyline = std::vector<Point>;
using Glyph = std::vector<Polyline>;

Polyline arc(double cx, double cy, double rx, double ry, double from_deg, double to_deg,
             int segments = 20) {
  Polyline p;
  for (int i = 0; i <= segments; ++i) {
    const double a = (from_deg + (to_deg - from_deg) * i / segments) * M_PI / 180.0;
    p.push_back({cx + rx * std::cos(a), cy + ry * std::sin(a)});
  }
  return p;
}

// Coordinates are in [-1, 1]² with y pointing up.
const std::vector<Glyph>& id_glyphs() {
  static const std::vector<Glyph> glyphs = {
      {arc(0, 0, 0.55, 0.7, 0, 360, 28)},                                   // ring
      {{{0, -0.75}, {0, 0.75}}},                                            // bar
      {{{-0.6, -0.7}, {0.6, 0.7}}, {{-0.6, 0.7}, {0.6, -0.7}}},             // X
      {{{-0.6, -0.7}, {0, 0.7}, {0.6, -0.7}}},                              // caret
      {{{-0.6, 0.7}, {0.6, 0.7}, {-0.6, -0.7}, {0.6, -0.7}}},               // Z
      {{{-0.75, 0}, {0.75, 0}}},                                            // dash
      {{{-0.6, 0.7}, {0.6, 0.7}, {-0.1, -0.75}}},                           // seven
      {arc(0.1, 0, 0.6, 0.7, 50, 310, 24)},                                 // C
      {{{0, 0.75}, {0.6, 0}, {0, -0.75}, {-0.6, 0}, {0, 0.75}}},            // diamond
      {{{-0.3, -0.75}, {-0.3, 0.75}}, {{0.3, -0.75}, {0.3, 0.75}}},         // double bar
  };
  return glyphs;
}

const std::vector<Glyph>& near_glyphs_a() {
  static const std::vector<Glyph> glyphs = {
      {{{0, -0.7}, {0, 0.7}}, {{-0.7, 0}, {0.7, 0}}},                        // plus
      {{{-0.65, -0.6}, {0.65, -0.6}, {0, 0.7}, {-0.65, -0.6}}},              // triangle
      {{{-0.6, -0.6}, {0.6, -0.6}, {0.6, 0.6}, {-0.6, 0.6}, {-0.6, -0.6}}},  // square
      {{{-0.65, 0.7}, {0.65, 0.7}}, {{0, 0.7}, {0, -0.75}}},                 // T
  };
  return glyphs;
}

const std::vector<Glyph>& near_glyphs_b() {
  static const std::vector<Glyph> glyphs = {
      {{{-0.45, 0.75}, {-0.45, -0.7}, {0.55, -0.7}}},                        // L
      {arc(0, 0.38, 0.35, 0.35, 0, 360, 20), arc(0, -0.38, 0.4, 0.38, 0, 360, 20)},  // 8
      {{{-0.6, 0.7}, {0.6, 0.7}, {-0.6, -0.7}, {0.6, -0.7}, {-0.6, 0.7}}},   // hourglass
      {{{0.55, 0.7}, {-0.5, 0.7}, {-0.5, -0.7}, {0.55, -0.7}}, {{-0.5, 0}, {0.35, 0}}},  // E
  };
  return glyphs;
}

double segment_distance(Point p, Point a, Point b) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double ex = a.x + t * dx - p.x, ey = a.y + t * dy - p.y;
  return std::sqrt(ex * ex + ey * ey);
}

void render_glyph(const Glyph& glyph, std::size_t size, Rng& rng, std::span<float> out) {
  const double scale = 0.75 + 0.25 * rng.uniform();
  const double angle = (rng.uniform() - 0.5) * 0.4;
  const double tx = (rng.uniform() - 0.5) * 0.24;
  const double ty = (rng.uniform() - 0.5) * 0.24;
  const double half_width = 0.10 + 0.05 * rng.uniform();
  const double peak = 0.85 + 0.15 * rng.uniform();
  const double ca = std::cos(angle), sa = std::sin(angle);

  std::vector<std::pair<Point, Point>> segs;
  for (const Polyline& line : glyph) {
    for (std::size_t i = 0; i + 1 < line.size(); ++i) {
      auto tf = [&](Point p) {
        return Point{scale * (ca * p.x - sa * p.y) + tx, scale * (sa * p.x + ca * p.y) + ty};
      };
      segs.emplace_back(tf(line[i]), tf(line[i + 1]));
    }
  }
  const double pixel = 2.0 / static_cast<double>(size);
  for (std::size_t r = 0; r < size; ++r) {
    for (std::size_t c = 0; c < size; ++c) {
      const Point p{-1.0 + (static_cast<double>(c) + 0.5) * pixel,
                    1.0 - (static_cast<double>(r) + 0.5) * pixel};
      double d = 1e9;
      for (const auto& [a, b] : segs) d = std::min(d, segment_distance(p, a, b));
      const double v = std::clamp(0.5 + (half_width - d) / pixel, 0.0, 1.0);
      out[r * size + c] = static_cast<float>(peak * v);
    }
  }
}

void normalise(std::span<float> img) {
  const auto [lo, hi] = std::minmax_element(img.begin(), img.end());
  const float a = *lo, b = *hi;
  for (float& v : img) v = b > a ? (v - a) / (b - a) : 0.0f;
}

void render_texture(std::size_t size, Rng& rng, std::span<float> out) {
  const int waves = 2 + static_cast<int>(rng.below(2));
  std::fill(out.begin(), out.end(), 0.0f);
  for (int w = 0; w < waves; ++w) {
    const double freq = 2.0 + 4.0 * rng.uniform();  // cycles per image
    const double dir = rng.uniform() * M_PI;
    const double phase = rng.uniform() * 2.0 * M_PI;
    const double amp = 0.5 + 0.5 * rng.uniform();
    for (std::size_t r = 0; r < size; ++r)
      for (std::size_t c = 0; c < size; ++c) {
        const double u = (std::cos(dir) * c + std::sin(dir) * r) / static_cast<double>(size);
        out[r * size + c] += static_cast<float>(amp * std::sin(2.0 * M_PI * freq * u + phase));
      }
  }
  normalise(out);
}

void render_noise_field(std::size_t size, Rng& rng, std::span<float> out) {
  std::vector<double> raw(size * size);
  for (double& v : raw) v = rng.uniform();
  const int radius = 1 + static_cast<int>(rng.below(2));
  const int n = static_cast<int>(size);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      double s = 0.0;
      int k = 0;
      for (int dr = -radius; dr <= radius; ++dr)
        for (int dc = -radius; dc <= radius; ++dc) {
          const int rr = r + dr, cc = c + dc;
          if (rr < 0 || cc < 0 || rr >= n || cc >= n) continue;
          s += raw[static_cast<std::size_t>(rr * n + cc)];
          ++k;
        }
      out[static_cast<std::size_t>(r * n + c)] = static_cast<float>(s / k);
    }
  normalise(out);
}

void apply_shift(const CovariateShift& shift, Rng& rng, std::span<float> img) {
  if (shift.is_identity()) return;
  for (float& v : img) {
    double p = shift.background + shift.contrast * v;
    if (shift.noise_sigma > 0.0) p += shift.noise_sigma * rng.normal();
    v = static_cast<float>(std::clamp(p, 0.0, 1.0));
  }
}

void quantise(std::span<float> img) {
  for (float& v : img) v = static_cast<float>(std::round(v * 255.0f) / 255.0);
}

}  // namespace

std::string_view to_string(Generator g) {
  switch (g) {
    case Generator::kIdGlyphs: return "id_glyphs";
    case Generator::kNearGlyphsA: return "near_glyphs_a";
    case Generator::kNearGlyphsB: return "near_glyphs_b";
    case Generator::kTexture: return "texture";
    case Generator::kNoiseField: return "noise_field";
  }
  return "unknown";
}

std::optional<Generator> parse_generator(std::string_view name) {
  for (Generator g : {Generator::kIdGlyphs, Generator::kNearGlyphsA, Generator::kNearGlyphsB,
                      Generator::kTexture, Generator::kNoiseField}) {
    if (to_string(g) == name) return g;
  }
  return std::nullopt;
}

std::string_view to_string(SplitUse u) {
  switch (u) {
    case SplitUse::kTrain: return "train";
    case SplitUse::kTest: return "test";
    case SplitUse::kVal: return "val";
  }
  return "unknown";
}

std::optional<SplitUse> parse_split_use(std::string_view name) {
  for (SplitUse u : {SplitUse::kTrain, SplitUse::kTest, SplitUse::kVal}) {
    if (to_string(u) == name) return u;
  }
  return std::nullopt;
}

std::vector<SynthSplit> SynthBenchConfig::default_splits() {
  return {
      {"train", Role::kTrainId, SplitUse::kTrain, Generator::kIdGlyphs, 4000, {}},
      {"test_id", Role::kTrainId, SplitUse::kTest, Generator::kIdGlyphs, 1000, {}},
      {"id_val", Role::kTrainId, SplitUse::kVal, Generator::kIdGlyphs, 200, {}},
      {"csid_noise", Role::kCsid, SplitUse::kTest, Generator::kIdGlyphs, 1000, {0.1, 1.0, 0.0}},
      {"csid_contrast", Role::kCsid, SplitUse::kTest, Generator::kIdGlyphs, 1000, {0.0, 0.5, 0.35}},
      {"near_a", Role::kNearOod, SplitUse::kTest, Generator::kNearGlyphsA, 1000, {}},
      {"near_b", Role::kNearOod, SplitUse::kTest, Generator::kNearGlyphsB, 1000, {}},
      {"near_val", Role::kNearOod, SplitUse::kVal, Generator::kNearGlyphsA, 200, {}},
      {"far_texture", Role::kFarOod, SplitUse::kTest, Generator::kTexture, 1000, {}},
      {"far_noise", Role::kFarOod, SplitUse::kTest, Generator::kNoiseField, 1000, {}},
  };
}

std::uint64_t split_stream_seed(std::uint64_t seed, std::string_view split_name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : split_name) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return Rng(seed).derive(h).next_u64();
}

Dataset synth_split_with_stream(const SynthBenchConfig& config, const SynthSplit& split,
                                std::uint64_t stream_seed) {
  require(config.classes >= 2, ErrorCode::kInvalidArgument,
          "synth: class count must be at least 2");
  require(config.classes <= kMaxSynthClasses, ErrorCode::kInvalidArgument,
          "synth: at most " + std::to_string(kMaxSynthClasses) + " classes available");
  require(config.image_size >= 8, ErrorCode::kInvalidArgument, "synth: image size below 8");
  const std::size_t s = config.image_size;
  Dataset d;
  d.name = split.name;
  d.role = split.role;
  d.use = split.use;
  d.images = Tensor({split.count, 1, s, s});

  Rng render(stream_seed);
  Rng shift_rng = render.derive(0x5817);
  const bool labelled = split.generator == Generator::kIdGlyphs;
  for (std::size_t i = 0; i < split.count; ++i) {
    auto img = d.images.item(i);
    switch (split.generator) {
      case Generator::kIdGlyphs: {
        const int label = static_cast<int>(i % config.classes);
        d.labels.push_back(label);
        render_glyph(id_glyphs()[static_cast<std::size_t>(label)], s, render, img);
        break;
      }
      case Generator::kNearGlyphsA:
      case Generator::kNearGlyphsB: {
        const auto& set =
            split.generator == Generator::kNearGlyphsA ? near_glyphs_a() : near_glyphs_b();
        render_glyph(set[i % set.size()], s, render, img);
        break;
      }
      case Generator::kTexture: render_texture(s, render, img); break;
      case Generator::kNoiseField: render_noise_field(s, render, img); break;
    }
    apply_shift(split.shift, shift_rng, img);
    quantise(img);
  }
  if (!labelled) d.labels.clear();
  return d;
}

Dataset synth_split(const SynthBenchConfig& config, const SynthSplit& split) {
  return synth_split_with_stream(config, split, split_stream_seed(config.seed, split.name));
}

std::vector<Dataset> synth_benchmark(const SynthBenchConfig& config) {
  require(config.classes >= 2, ErrorCode::kInvalidArgument,
          "synth: class count must be at least 2");
  std::vector<Dataset> out;
  for (const SynthSplit& split : config.splits) out.push_back(synth_split(config, split));
  return out;
}

}  // namespace semood
