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

#include "semood/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace semood {

namespace fs = std::filesystem;
using nlohmann::json;

static_assert(std::endian::native == std::endian::little,
              "file encoders assume a little-endian host");

namespace {

std::string at_offset(std::size_t offset) { return " at byte offset " + std::to_string(offset); }

class Reader {
 public:
  Reader(std::string_view bytes, std::size_t offset, std::string what)
      : bytes_(bytes), pos_(offset), what_(std::move(what)) {}

  std::size_t pos() const noexcept { return pos_; }

  void need(std::size_t n) const {
    require(pos_ + n <= bytes_.size() && pos_ + n >= pos_, ErrorCode::kFormat,
            what_ + ": truncated, needed " + std::to_string(n) + " more bytes" + at_offset(pos_));
  }

  std::string_view take(std::size_t n) {
    need(n);
    std::string_view out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  template <class T>
  T le() {
    std::string_view b = take(sizeof(T));
    T v;
    std::memcpy(&v, b.data(), sizeof(T));
    return v;
  }

  std::uint32_t be32() {
    std::string_view b = take(4);
    std::uint32_t v = 0;
    for (char c : b) v = (v << 8) | static_cast<unsigned char>(c);
    return v;
  }

 private:
  std::string_view bytes_;
  std::size_t pos_;
  std::string what_;
};

template <class T>
void put_le(std::string& out, T v) {
  char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  out.append(b, sizeof(T));
}

void put_be32(std::string& out, std::uint32_t v) {
  for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<char>((v >> s) & 0xff));
}

void check_shape(const Shape& shape, const char* what) {
  require(shape.size() <= 255, ErrorCode::kInvalidArgument,
          std::string(what) + ": more than 255 dimensions");
  for (std::size_t d : shape) {
    require(d <= 0xffffffffULL, ErrorCode::kInvalidArgument,
            std::string(what) + ": dimension exceeds 32 bits");
  }
}

template <class T>
std::string encode_block(const Shape& shape, std::span<const T> data, std::uint8_t dtype) {
  check_shape(shape, "tensor");
  std::string out("TNSR");
  put_le<std::uint16_t>(out, kTensorVersion);
  out.push_back(static_cast<char>(dtype));
  out.push_back(static_cast<char>(shape.size()));
  for (std::size_t d : shape) put_le<std::uint32_t>(out, static_cast<std::uint32_t>(d));
  const std::size_t bytes = data.size() * sizeof(T);
  const std::size_t start = out.size();
  out.resize(start + bytes);
  if (bytes) std::memcpy(out.data() + start, data.data(), bytes);
  return out;
}

struct RawBlock {
  Shape shape;
  std::uint8_t dtype = 0;
  std::string_view payload;
};

RawBlock decode_block(std::string_view bytes, std::size_t& offset) {
  Reader r(bytes, offset, "tensor");
  const std::size_t start = r.pos();
  require(r.take(4) == "TNSR", ErrorCode::kFormat, "tensor: bad magic" + at_offset(start));
  const std::size_t vpos = r.pos();
  const auto version = r.le<std::uint16_t>();
  require(version == kTensorVersion, ErrorCode::kFormat,
          "tensor: unsupported version " + std::to_string(version) + at_offset(vpos));
  RawBlock b;
  const std::size_t dpos = r.pos();
  b.dtype = r.le<std::uint8_t>();
  require(b.dtype == kDtypeFloat32 || b.dtype == kDtypeFloat64, ErrorCode::kFormat,
          "tensor: unsupported dtype code " + std::to_string(b.dtype) + at_offset(dpos));
  const auto ndim = r.le<std::uint8_t>();
  std::size_t count = 1;
  for (std::size_t i = 0; i < ndim; ++i) {
    const std::size_t d = r.le<std::uint32_t>();
    b.shape.push_back(d);
    count *= d;
  }
  const std::size_t width = b.dtype == kDtypeFloat32 ? 4 : 8;
  b.payload = r.take(count * width);
  offset = r.pos();
  return b;
}

template <class T>
BasicTensor<T> block_tensor(const RawBlock& b) {
  const std::size_t n = shape_size(b.shape);
  std::vector<T> data(n);
  if (b.dtype == kDtypeFloat32) {
    if constexpr (std::is_same_v<T, float>) {
      if (n) std::memcpy(data.data(), b.payload.data(), n * 4);
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        float f;
        std::memcpy(&f, b.payload.data() + 4 * i, 4);
        data[i] = f;
      }
    }
  } else {
    if constexpr (std::is_same_v<T, double>) {
      if (n) std::memcpy(data.data(), b.payload.data(), n * 8);
    } else {
      fail(ErrorCode::kFormat, "tensor: float64 block where float32 was expected");
    }
  }
  return BasicTensor<T>(b.shape, std::move(data));
}

}  // namespace

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  require(!in.bad(), ErrorCode::kIo, "read failed: " + path.string());
  return std::move(ss).str();
}

void write_file(const fs::path& path, std::string_view bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorCode::kIo, "cannot create " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  require(static_cast<bool>(out), ErrorCode::kIo, "write failed: " + path.string());
}

// ---- TNSR --------------------------------------------------------------

std::string encode_tensor(const Tensor& t) {
  return encode_block<float>(t.shape(), t.data(), kDtypeFloat32);
}

Tensor decode_tensor(std::string_view bytes, std::size_t& offset) {
  const std::size_t start = offset;
  std::size_t pos = offset;
  RawBlock b = decode_block(bytes, pos);
  require(b.dtype == kDtypeFloat32, ErrorCode::kFormat,
          "tensor: unsupported dtype code " + std::to_string(b.dtype) + at_offset(start + 6));
  offset = pos;
  return block_tensor<float>(b);
}

void write_tensor(const fs::path& path, const Tensor& t) { write_file(path, encode_tensor(t)); }

Tensor read_tensor(const fs::path& path) {
  const std::string bytes = read_file(path);
  std::size_t offset = 0;
  Tensor t = decode_tensor(bytes, offset);
  require(offset == bytes.size(), ErrorCode::kFormat,
          "tensor: trailing bytes" + at_offset(offset) + " in " + path.string());
  return t;
}

// ---- IDX ---------------------------------------------------------------

Tensor decode_idx_images(std::string_view bytes) {
  Reader r(bytes, 0, "idx images");
  const auto magic = r.be32();
  require(magic == kIdxImagesMagic, ErrorCode::kFormat, "idx images: bad magic" + at_offset(0));
  const std::size_t n = r.be32(), h = r.be32(), w = r.be32();
  const std::size_t pixels = n * h * w;
  const std::size_t payload = r.pos();
  std::string_view data = r.take(pixels);
  require(r.pos() == bytes.size(), ErrorCode::kFormat,
          "idx images: trailing bytes" + at_offset(payload + pixels));
  Tensor t({n, 1, h, w});
  for (std::size_t i = 0; i < pixels; ++i) {
    t[i] = static_cast<float>(static_cast<double>(static_cast<unsigned char>(data[i])) / 255.0);
  }
  return t;
}

std::vector<int> decode_idx_labels(std::string_view bytes) {
  Reader r(bytes, 0, "idx labels");
  const auto magic = r.be32();
  require(magic == kIdxLabelsMagic, ErrorCode::kFormat, "idx labels: bad magic" + at_offset(0));
  const std::size_t n = r.be32();
  const std::size_t payload = r.pos();
  std::string_view data = r.take(n);
  require(r.pos() == bytes.size(), ErrorCode::kFormat,
          "idx labels: trailing bytes" + at_offset(payload + n));
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<unsigned char>(data[i]);
  return labels;
}

Tensor read_idx_images(const fs::path& path) { return decode_idx_images(read_file(path)); }
std::vector<int> read_idx_labels(const fs::path& path) { return decode_idx_labels(read_file(path)); }

std::string encode_idx_images(const Tensor& images) {
  require(images.rank() == 4 && images.dim(1) == 1, ErrorCode::kShapeMismatch,
          "idx images: expected N×1×H×W, got " + shape_to_string(images.shape()));
  std::string out;
  put_be32(out, kIdxImagesMagic);
  for (std::size_t a : {0, 2, 3}) {
    require(images.dim(a) <= 0xffffffffULL, ErrorCode::kInvalidArgument,
            "idx images: dimension exceeds 32 bits");
    put_be32(out, static_cast<std::uint32_t>(images.dim(a)));
  }
  out.reserve(out.size() + images.size());
  for (float v : images.data()) {
    require(v >= 0.0f && v <= 1.0f, ErrorCode::kInvalidArgument,
            "idx images: pixel outside [0, 1]");
    out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0))));
  }
  return out;
}

std::string encode_idx_labels(std::span<const int> labels) {
  std::string out;
  put_be32(out, kIdxLabelsMagic);
  put_be32(out, static_cast<std::uint32_t>(labels.size()));
  for (int l : labels) {
    require(l >= 0 && l <= 255, ErrorCode::kInvalidArgument, "idx labels: label outside 0..255");
    out.push_back(static_cast<char>(static_cast<unsigned char>(l)));
  }
  return out;
}

void write_idx_images(const fs::path& path, const Tensor& images) {
  write_file(path, encode_idx_images(images));
}
void write_idx_labels(const fs::path& path, std::span<const int> labels) {
  write_file(path, encode_idx_labels(labels));
}

// ---- model container ---------------------------------------------------

namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t parse_hex64(const json& j, const char* what) {
  require(j.is_string(), ErrorCode::kFormat, std::string("model header: ") + what + " not a string");
  const std::string s = j.get<std::string>();
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v, 16);
  require(ec == std::errc() && p == s.data() + s.size() && s.size() == 16, ErrorCode::kFormat,
          std::string("model header: bad ") + what);
  return v;
}

class BlockWriter {
 public:
  void add(const std::string& name, const Shape& shape, std::span<const float> data) {
    push(name, encode_block<float>(shape, data, kDtypeFloat32));
  }
  void add(const std::string& name, const Shape& shape, std::span<const double> data) {
    push(name, encode_block<double>(shape, data, kDtypeFloat64));
  }
  void add(const std::string& name, const Matrix& m) {
    add(name, {m.rows, m.cols}, std::span<const double>(m.values));
  }
  void add(const std::string& name, const std::vector<double>& v) {
    add(name, {v.size()}, std::span<const double>(v));
  }
  json index;
  std::string payload;

 private:
  void push(const std::string& name, const std::string& block) {
    index.push_back({{"name", name}, {"offset", payload.size()}, {"bytes", block.size()}});
    payload += block;
  }
};

class BlockReader {
 public:
  BlockReader(const json& index, std::string_view payload) : payload_(payload) {
    require(index.is_array(), ErrorCode::kFormat, "model header: blocks must be an array");
    for (const json& e : index) {
      require(e.is_object() && e.contains("name") && e.contains("offset") && e.contains("bytes"),
              ErrorCode::kFormat, "model header: malformed block entry");
      entries_.push_back({e["name"].get<std::string>(), e["offset"].get<std::size_t>(),
                          e["bytes"].get<std::size_t>()});
    }
  }

  RawBlock raw(const std::string& name) const {
    for (const auto& e : entries_) {
      if (e.name != name) continue;
      require(e.offset <= payload_.size() && e.bytes <= payload_.size() - e.offset,
              ErrorCode::kFormat, "model: block '" + name + "' lies outside the file");
      std::string_view slice = payload_.substr(e.offset, e.bytes);
      std::size_t pos = 0;
      RawBlock b = decode_block(slice, pos);
      require(pos == slice.size(), ErrorCode::kFormat, "model: block '" + name + "' has trailing bytes");
      return b;
    }
    fail(ErrorCode::kFormat, "model: block '" + name + "' missing");
  }

  Tensor f32(const std::string& name) const { return block_tensor<float>(raw(name)); }

  std::vector<double> vec(const std::string& name) const {
    auto t = block_tensor<double>(raw(name));
    require(t.rank() == 1, ErrorCode::kFormat, "model: block '" + name + "' must be a vector");
    return t.storage();
  }

  Matrix mat(const std::string& name) const {
    auto t = block_tensor<double>(raw(name));
    require(t.rank() == 2, ErrorCode::kFormat, "model: block '" + name + "' must be a matrix");
    Matrix m(t.dim(0), t.dim(1));
    m.values = t.storage();
    return m;
  }

 private:
  struct Entry {
    std::string name;
    std::size_t offset;
    std::size_t bytes;
  };
  std::vector<Entry> entries_;
  std::string_view payload_;
};

json net_config_json(const NetConfig& c) {
  json convs = json::array();
  for (const ConvSpec& s : c.convs) convs.push_back({s.out_channels, s.kernel});
  return {{"in_channels", c.in_channels}, {"height", c.height}, {"width", c.width},
          {"convs", convs},           {"pool", c.pool},     {"hidden", c.hidden},
          {"classes", c.classes}};
}

NetConfig net_config_from(const json& j) {
  NetConfig c;
  c.in_channels = j.at("in_channels").get<std::size_t>();
  c.height = j.at("height").get<std::size_t>();
  c.width = j.at("width").get<std::size_t>();
  c.convs.clear();
  for (const json& s : j.at("convs")) {
    c.convs.push_back({s.at(0).get<std::size_t>(), s.at(1).get<std::size_t>()});
  }
  c.pool = j.at("pool").get<std::size_t>();
  c.hidden = j.at("hidden").get<std::vector<std::size_t>>();
  c.classes = j.at("classes").get<std::size_t>();
  c.validate();
  return c;
}

void put_pipeline(BlockWriter& w, json& h, const std::string& prefix, const DensityPipeline& p) {
  h["projection"] = p.projection.has_value();
  if (p.projection) {
    w.add(prefix + ".proj.mean", p.projection->mean);
    w.add(prefix + ".proj.basis", p.projection->basis);
    w.add(prefix + ".proj.captured", p.projection->captured);
  }
  w.add(prefix + ".gmm.weights", p.gmm.weights());
  w.add(prefix + ".gmm.means", p.gmm.means());
  w.add(prefix + ".gmm.variances", p.gmm.variances());
}

DensityPipeline get_pipeline(const BlockReader& r, const json& h, const std::string& prefix) {
  DensityPipeline p;
  if (h.at("projection").get<bool>()) {
    ProjectionModel m;
    m.mean = r.vec(prefix + ".proj.mean");
    m.basis = r.mat(prefix + ".proj.basis");
    m.captured = r.vec(prefix + ".proj.captured");
    m.input_dim = m.basis.rows;
    m.target_dim = m.basis.cols;
    require(m.mean.size() == m.input_dim && m.captured.size() == m.target_dim,
            ErrorCode::kFormat, "model: inconsistent projection blocks for " + prefix);
    p.projection = std::move(m);
  }
  p.gmm = GmmModel(r.vec(prefix + ".gmm.weights"), r.mat(prefix + ".gmm.means"),
                   r.mat(prefix + ".gmm.variances"));
  require(!p.projection || p.projection->target_dim == p.gmm.dim(), ErrorCode::kFormat,
          "model: projection and mixture dimensions differ for " + prefix);
  return p;
}

std::string projection_name(ProjectionKind k) {
  return k == ProjectionKind::kPca ? "pca" : "within_class";
}

}  // namespace

std::vector<std::string> model_components(const ModelFile& m) {
  std::vector<std::string> c;
  if (m.bundle.net) c.push_back("net");
  if (m.bundle.sem) c.push_back("sem");
  if (m.bundle.mds) c.push_back("mds");
  return c;
}

std::string encode_model(const ModelFile& m) {
  const ScoringBundle& b = m.bundle;
  BlockWriter w;
  json h;
  h["format"] = "semood-model";
  h["components"] = model_components(m);
  h["provenance"] = {{"train_seed", m.provenance.train_seed},
                     {"fit_seed", m.provenance.fit_seed},
                     {"finetune_seed", m.provenance.finetune_seed},
                     {"finetuned", m.provenance.finetuned}};
  h["odin"] = {{"temperature", b.odin.temperature},
               {"epsilon", b.odin.epsilon},
               {"grid", b.odin.grid}};
  h["ebo"] = {{"temperature", b.ebo_temperature}};
  if (b.net) {
    const NetParams& p = *b.net;
    h["net"] = {{"config", net_config_json(p.config)}, {"version", hex64(p.version)},
                {"layers", p.weights.size()}};
    for (std::size_t i = 0; i < p.weights.size(); ++i) {
      w.add("net.weight." + std::to_string(i), p.weights[i].shape(), p.weights[i].data());
      w.add("net.bias." + std::to_string(i), p.biases[i].shape(), p.biases[i].data());
    }
  }
  if (b.sem) {
    const SemModel& s = *b.sem;
    json top, low;
    put_pipeline(w, top, "sem.top", s.top);
    put_pipeline(w, low, "sem.low", s.low);
    h["sem"] = {{"net_version", hex64(s.meta.net_version)},
                {"top_components", s.meta.top_components},
                {"low_components", s.meta.low_components},
                {"seed", hex64(s.meta.seed)},
                {"projection", projection_name(s.meta.projection)},
                {"top", top},
                {"low", low}};
  }
  if (b.mds) {
    const MdsModel& d = *b.mds;
    h["mds"] = {{"classes", d.classes}};
    w.add("mds.means", d.class_means);
    w.add("mds.covariance", d.covariance);
    w.add("mds.precision", d.precision);
  }
  h["blocks"] = w.index;

  const std::string header = h.dump();
  std::string out("SEMM");
  put_le<std::uint16_t>(out, kModelVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(header.size()));
  out += header;
  out += w.payload;
  return out;
}

ModelFile decode_model(std::string_view bytes) {
  Reader r(bytes, 0, "model");
  require(r.take(4) == "SEMM", ErrorCode::kFormat, "model: bad magic" + at_offset(0));
  const auto version = r.le<std::uint16_t>();
  require(version == kModelVersion, ErrorCode::kFormat,
          "model: unsupported version " + std::to_string(version) + at_offset(4));
  const std::size_t len = r.le<std::uint32_t>();
  const std::size_t hpos = r.pos();
  std::string_view header_text = r.take(len);
  const std::string_view payload = bytes.substr(r.pos());

  json h = json::parse(header_text, nullptr, false);
  require(!h.is_discarded() && h.is_object(), ErrorCode::kFormat,
          "model: corrupted header" + at_offset(hpos));
  require(h.value("format", "") == "semood-model", ErrorCode::kFormat,
          "model: header is not a semood model");

  ModelFile m;
  try {
    const BlockReader blocks(h.at("blocks"), payload);
    const json& prov = h.at("provenance");
    m.provenance.train_seed = prov.at("train_seed").get<std::uint64_t>();
    m.provenance.fit_seed = prov.at("fit_seed").get<std::uint64_t>();
    m.provenance.finetune_seed = prov.at("finetune_seed").get<std::uint64_t>();
    m.provenance.finetuned = prov.at("finetuned").get<bool>();
    m.bundle.odin.temperature = h.at("odin").at("temperature").get<double>();
    m.bundle.odin.epsilon = h.at("odin").at("epsilon").get<double>();
    m.bundle.odin.grid = h.at("odin").at("grid").get<std::vector<double>>();
    m.bundle.ebo_temperature = h.at("ebo").at("temperature").get<double>();

    const auto components = h.at("components").get<std::vector<std::string>>();
    auto has = [&](const char* c) {
      return std::find(components.begin(), components.end(), c) != components.end();
    };
    if (has("net")) {
      const json& jn = h.at("net");
      NetParams p;
      p.config = net_config_from(jn.at("config"));
      const auto wshapes = p.config.weight_shapes();
      const auto bshapes = p.config.bias_shapes();
      require(jn.at("layers").get<std::size_t>() == wshapes.size(), ErrorCode::kFormat,
              "model: layer count does not match the net config");
      for (std::size_t i = 0; i < wshapes.size(); ++i) {
        p.weights.push_back(blocks.f32("net.weight." + std::to_string(i)));
        p.biases.push_back(blocks.f32("net.bias." + std::to_string(i)));
        require(p.weights.back().shape() == wshapes[i] && p.biases.back().shape() == bshapes[i],
                ErrorCode::kFormat, "model: layer " + std::to_string(i) + " shape mismatch");
      }
      p.version = parse_hex64(jn.at("version"), "net version");
      require(fingerprint(p) == p.version, ErrorCode::kFormat,
              "model: net weights do not match their recorded fingerprint");
      m.bundle.net = std::move(p);
    }
    if (has("sem")) {
      const json& js = h.at("sem");
      SemModel s;
      s.meta.net_version = parse_hex64(js.at("net_version"), "sem net version");
      s.meta.top_components = js.at("top_components").get<std::size_t>();
      s.meta.low_components = js.at("low_components").get<std::size_t>();
      s.meta.seed = parse_hex64(js.at("seed"), "sem seed");
      s.meta.projection = js.at("projection").get<std::string>() == "pca"
                              ? ProjectionKind::kPca
                              : ProjectionKind::kWithinClass;
      s.top = get_pipeline(blocks, js.at("top"), "sem.top");
      s.low = get_pipeline(blocks, js.at("low"), "sem.low");
      m.bundle.sem = std::move(s);
    }
    if (has("mds")) {
      MdsModel d;
      d.classes = h.at("mds").at("classes").get<std::vector<int>>();
      d.class_means = blocks.mat("mds.means");
      d.covariance = blocks.mat("mds.covariance");
      d.precision = blocks.mat("mds.precision");
      const std::size_t dim = d.class_means.cols;
      require(d.class_means.rows == d.classes.size() && d.covariance.rows == dim &&
                  d.covariance.cols == dim && d.precision.rows == dim && d.precision.cols == dim,
              ErrorCode::kFormat, "model: inconsistent MDS blocks");
      m.bundle.mds = std::move(d);
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::kFormat, std::string("model: corrupted header: ") + e.what());
  }
  return m;
}

void save_model(const fs::path& path, const ModelFile& m) { write_file(path, encode_model(m)); }

ModelFile load_model(const fs::path& path) { return decode_model(read_file(path)); }

namespace {

template <class T>
T take_component(std::optional<T>&& v, const fs::path& path, const char* name) {
  require(v.has_value(), ErrorCode::kMissingComponent,
          "model file " + path.string() + " has no '" + name + "' component");
  return std::move(*v);
}

}  // namespace

NetParams load_net(const fs::path& path) {
  return take_component(std::move(load_model(path).bundle.net), path, "net");
}
SemModel load_sem(const fs::path& path) {
  return take_component(std::move(load_model(path).bundle.sem), path, "sem");
}
MdsModel load_mds(const fs::path& path) {
  return take_component(std::move(load_model(path).bundle.mds), path, "mds");
}

// ---- scores and reports ------------------------------------------------

namespace {

std::string fmt_double(double v) {
  char buf[40];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

std::string fmt_metric(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out("\"");
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string score_file_stem(std::string_view dataset, std::string_view kind) {
  return std::string(dataset) + "." + std::string(kind);
}

void write_scores(const fs::path& tnsr_path, const fs::path& csv_path, std::string_view dataset,
                  std::string_view kind, std::span<const double> scores) {
  Tensor t({scores.size()});
  for (std::size_t i = 0; i < scores.size(); ++i) t[i] = static_cast<float>(scores[i]);
  write_tensor(tnsr_path, t);
  std::string csv = "index,dataset,kind,score\n";
  for (std::size_t i = 0; i < scores.size(); ++i) {
    csv += std::to_string(i) + "," + csv_field(dataset) + "," + csv_field(kind) + "," +
           fmt_double(scores[i]) + "\n";
  }
  write_file(csv_path, csv);
}

std::vector<double> read_scores(const fs::path& tnsr_path) {
  const Tensor t = read_tensor(tnsr_path);
  require(t.rank() == 1, ErrorCode::kFormat,
          "scores: " + tnsr_path.string() + " must hold a vector, got " +
              shape_to_string(t.shape()));
  std::vector<double> out(t.data().begin(), t.data().end());
  for (double v : out) {
    require(std::isfinite(v), ErrorCode::kFormat, "scores: non-finite value in " + tnsr_path.string());
  }
  return out;
}

std::vector<double> read_scores_csv(const fs::path& csv_path) {
  const std::string text = read_file(csv_path);
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  require(line == "index,dataset,kind,score", ErrorCode::kFormat,
          "scores: unexpected CSV header in " + csv_path.string());
  std::vector<double> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.rfind(',');
    require(comma != std::string::npos, ErrorCode::kFormat, "scores: malformed CSV row");
    double v = 0.0;
    const char* b = line.data() + comma + 1;
    const char* e = line.data() + line.size();
    auto [p, ec] = std::from_chars(b, e, v);
    require(ec == std::errc() && p == e, ErrorCode::kFormat, "scores: malformed CSV value");
    out.push_back(v);
  }
  return out;
}

std::string report_to_csv(const EvalReport& r) {
  std::string out = "dataset,role,kind,fpr95,auroc,aupr\n";
  for (const MetricRow& row : r.rows) {
    out += csv_field(row.dataset) + "," + std::string(to_string(row.role)) + "," +
           csv_field(row.kind) + "," + fmt_metric(row.fpr95) + "," + fmt_metric(row.auroc) + "," +
           fmt_metric(row.aupr) + "\n";
  }
  return out;
}

std::string report_to_json(const EvalReport& r) {
  json rows = json::array();
  for (const MetricRow& row : r.rows) {
    const char* type = row.type == RowType::kDataset     ? "dataset"
                       : row.type == RowType::kGroupMean ? "group_mean"
                                                         : "csid_contrast";
    rows.push_back({{"dataset", row.dataset},
                    {"role", std::string(to_string(row.role))},
                    {"kind", row.kind},
                    {"type", type},
                    {"fpr95", row.fpr95},
                    {"auroc", row.auroc},
                    {"aupr", row.aupr}});
  }
  json j = {{"id_policy", std::string(to_string(r.policy))}, {"rows", rows}};
  return j.dump(2) + "\n";
}

}  // namespace semood
