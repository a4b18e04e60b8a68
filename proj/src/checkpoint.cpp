#include "sanid/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "sanid/config.hpp"
#include "sanid/error.hpp"

namespace sanid {
namespace {

constexpr std::string_view kMagic = "SANIDCKP";

template <typename T>
void put_le(std::string& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xff));
  }
}

void put_double(std::string& out, double value) {
  put_le(out, std::bit_cast<std::uint64_t>(value));
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    std::uint64_t value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      value |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(T);
    return static_cast<T>(value);
  }

  double get_double() { return std::bit_cast<double>(get<std::uint64_t>()); }

  std::string_view take(std::uint64_t n) {
    need(n);
    const auto out = bytes_.substr(pos_, static_cast<std::size_t>(n));
    pos_ += static_cast<std::size_t>(n);
    return out;
  }

  std::size_t position() const noexcept { return pos_; }

 private:
  void need(std::uint64_t n) const {
    if (n > bytes_.size() - pos_) fail(ErrorKind::kCheckpoint, "corrupt checkpoint: truncated");
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

std::string metadata_text(const Checkpoint& c) {
  std::ostringstream out;
  out << "[config]\n" << to_config_text(c.config);
  out << "[vocab]\n";
  for (const auto& t : c.vocab.tokens()) out << t << '\n';
  out << "[labels]\n";
  for (const auto& l : c.labels.names()) out << l << '\n';
  return out.str();
}

void parse_metadata(std::string_view text, Checkpoint& c) {
  std::string section;
  std::string config_text;
  std::vector<std::string> tokens, labels;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string line(text.substr(pos, end - pos));
    pos = end + 1;
    if (line == "[config]" || line == "[vocab]" || line == "[labels]") {
      section = line;
    } else if (section == "[config]") {
      config_text += line + '\n';
    } else if (section == "[vocab]") {
      tokens.push_back(line);
    } else if (section == "[labels]") {
      labels.push_back(line);
    } else {
      fail(ErrorKind::kCheckpoint, "corrupt checkpoint: metadata outside a section");
    }
  }
  try {
    c.config = resolve_train_config(parse_config_text(config_text, "checkpoint"));
    c.vocab = Vocab::from_tokens(tokens);
    c.labels = LabelSet(labels);
  } catch (const Error& e) {
    fail(ErrorKind::kCheckpoint, std::string("corrupt checkpoint metadata: ") + e.what());
  }
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (char c : bytes) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string serialize_checkpoint(const Checkpoint& c) {
  c.params.validate();
  std::string out(kMagic);
  put_le<std::uint32_t>(out, kCheckpointVersion);
  const std::string meta = metadata_text(c);
  put_le<std::uint64_t>(out, meta.size());
  out += meta;

  const auto arrays = c.params.arrays();
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(arrays.size()));
  for (const auto& ref : arrays) {
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(ref.name.size()));
    out += ref.name;
    put_le<std::uint8_t>(out, ref.frozen ? 1 : 0);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(ref.value->rank()));
    for (std::size_t dim : ref.value->shape()) put_le<std::uint64_t>(out, dim);
    for (double x : ref.value->values()) put_double(out, x);
  }
  put_le<std::uint64_t>(out, fnv1a64(out));
  return out;
}

Checkpoint deserialize_checkpoint(const std::string& bytes,
                                  std::optional<Architecture> expected) {
  if (bytes.size() < kMagic.size() + 4 + 8 ||
      std::string_view(bytes).substr(0, kMagic.size()) != kMagic) {
    fail(ErrorKind::kCheckpoint, "not a checkpoint file (bad magic or truncated)");
  }
  Reader in(bytes);
  in.take(kMagic.size());
  const auto version = in.get<std::uint32_t>();
  if (version != kCheckpointVersion) {
    fail(ErrorKind::kCheckpoint, "unsupported checkpoint version " + std::to_string(version) +
                                     " (this build reads version " +
                                     std::to_string(kCheckpointVersion) + ")");
  }
  if (bytes.size() < 8) fail(ErrorKind::kCheckpoint, "corrupt checkpoint: truncated");
  const std::string_view body = std::string_view(bytes).substr(0, bytes.size() - 8);
  Reader tail(std::string_view(bytes).substr(bytes.size() - 8));
  if (tail.get<std::uint64_t>() != fnv1a64(body)) {
    fail(ErrorKind::kCheckpoint, "corrupt checkpoint: checksum mismatch (truncated or damaged)");
  }

  Checkpoint c;
  const auto meta_len = in.get<std::uint64_t>();
  parse_metadata(in.take(meta_len), c);
  if (expected && *expected != c.config.arch) {
    fail(ErrorKind::kCheckpoint, "architecture mismatch: checkpoint holds " +
                                     std::string(architecture_name(c.config.arch)) +
                                     ", expected " + std::string(architecture_name(*expected)));
  }

  ModelDims dims;
  dims.arch = c.config.arch;
  dims.vocab_size = c.vocab.size();
  dims.embedding_dim = c.config.embedding_dim;
  dims.hidden_units = c.config.hidden_units;
  dims.classes = c.labels.size();
  try {
    c.params = ModelParams::zeros(dims);
  } catch (const Error& e) {
    fail(ErrorKind::kCheckpoint, std::string("checkpoint declares an invalid model: ") + e.what());
  }
  c.params.embedding.frozen = c.config.embeddings_frozen();

  auto arrays = c.params.arrays();
  const auto count = in.get<std::uint32_t>();
  if (count != arrays.size()) {
    fail(ErrorKind::kCheckpoint, "architecture mismatch: " + std::to_string(count) +
                                     " arrays stored, " +
                                     std::string(architecture_name(dims.arch)) + " needs " +
                                     std::to_string(arrays.size()));
  }
  for (auto& ref : arrays) {
    const auto name_len = in.get<std::uint32_t>();
    const std::string name(in.take(name_len));
    if (name != ref.name) {
      fail(ErrorKind::kCheckpoint, "architecture mismatch: found array '" + name +
                                       "' where '" + std::string(ref.name) + "' belongs");
    }
    const bool frozen = in.get<std::uint8_t>() != 0;
    if (frozen != ref.frozen) {
      fail(ErrorKind::kCheckpoint, "array '" + name + "' frozen flag disagrees with config");
    }
    const auto rank = in.get<std::uint32_t>();
    std::vector<std::size_t> shape;
    for (std::uint32_t i = 0; i < rank; ++i) shape.push_back(static_cast<std::size_t>(in.get<std::uint64_t>()));
    if (shape != ref.value->shape()) {
      std::string dims_text;
      for (auto d : shape) dims_text += (dims_text.empty() ? "" : "x") + std::to_string(d);
      fail(ErrorKind::kCheckpoint, "shape mismatch for '" + name + "': stored [" + dims_text +
                                       "], architecture needs " + ref.value->shape_string());
    }
    for (double& x : ref.value->values()) x = in.get_double();
  }
  if (in.position() != body.size()) {
    fail(ErrorKind::kCheckpoint, "corrupt checkpoint: trailing bytes after arrays");
  }
  return c;
}

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  const std::string bytes = serialize_checkpoint(checkpoint);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::kIo, "cannot write checkpoint " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorKind::kIo, "failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path,
                           std::optional<Architecture> expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open checkpoint " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return deserialize_checkpoint(buffer.str(), expected);
}

}  // namespace sanid
