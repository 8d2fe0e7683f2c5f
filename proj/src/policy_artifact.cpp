#include <cstring>
#include <fstream>

#include <json.hpp>

#include "alkit/errors.hpp"
#include "alkit/qnetwork.hpp"
#include "alkit/strategies.hpp"

namespace alkit::strategies {

namespace {

constexpr char kMagic[8] = {'A', 'L', 'K', 'I', 'T', 'P', 'O', 'L'};
constexpr uint32_t kFormatVersion = 1;

void put_u32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::string& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_f64(std::string& out, double v) {
  uint64_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  put_u64(out, bits);
}

class Reader {
 public:
  explicit Reader(std::string_view data) : data_(data) {}
  uint32_t u32() {
    need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }
  uint64_t u64() {
    need(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return v;
  }
  double f64() {
    const uint64_t bits = u64();
    double v;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
  }
  std::string_view bytes(size_t n) {
    need(n);
    auto s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool exhausted() const { return pos_ == data_.size(); }

 private:
  void need(size_t n) const {
    if (pos_ + n > data_.size()) throw ParseError("policy artifact: truncated file");
  }
  std::string_view data_;
  size_t pos_ = 0;
};

nlohmann::json layer_shapes() {
  using rl::kActionSize;
  using rl::kHidden1;
  using rl::kHidden2;
  using rl::kStateSize;
  return nlohmann::json::array({{kHidden1, kStateSize},
                                {kHidden1},
                                {kHidden2, kHidden1 + kActionSize},
                                {kHidden2},
                                {1, kHidden2},
                                {1}});
}

}  // namespace

namespace {

void write_container(const std::filesystem::path& path, const nlohmann::json& header,
                     std::span<const double> params) {
  const std::string header_text = header.dump();
  std::string out;
  out.append(kMagic, sizeof(kMagic));
  put_u32(out, kFormatVersion);
  put_u32(out, static_cast<uint32_t>(header_text.size()));
  out += header_text;
  put_u64(out, params.size());
  for (double v : params) put_f64(out, v);

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write artifact container: " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError("write failed: " + path.string());
}

}  // namespace

void save_policy_artifact(const PolicyArtifact& artifact, const std::filesystem::path& path) {
  if (static_cast<int>(artifact.theta.size()) != rl::kParamCount) {
    throw DomainError("policy artifact: expected " + std::to_string(rl::kParamCount) + " parameters");
  }
  nlohmann::json header;
  header["format"] = "alkit-policy";
  header["v_size"] = artifact.v_size;
  header["feature_schema_version"] = artifact.feature_schema_version;
  header["layers"] = layer_shapes();
  header["corpus_hash"] = artifact.corpus_hash;
  header["hyperparameters"] = artifact.hyperparameters_json.empty()
                                  ? nlohmann::json::object()
                                  : nlohmann::json::parse(artifact.hyperparameters_json);
  write_container(path, header, artifact.theta);
}

void save_model_dump(const models::LogisticRegression& model, const std::filesystem::path& path) {
  if (!model.fitted()) throw DomainError("model dump: model not fitted");
  nlohmann::json header;
  header["format"] = "alkit-model-dump";
  header["model_kind"] = "lr";
  header["feature_count"] = model.feature_count();
  header["l2_strength"] = model.config().l2_strength;
  std::vector<double> params(model.weights().begin(), model.weights().end());
  params.push_back(model.bias());
  write_container(path, header, params);
}

void save_model_dump(const models::RandomForest& model, const std::filesystem::path& path) {
  if (!model.fitted()) throw DomainError("model dump: model not fitted");
  nlohmann::json header;
  header["format"] = "alkit-model-dump";
  header["model_kind"] = "rf";
  header["feature_count"] = model.feature_count();
  header["tree_count"] = static_cast<int>(model.trees().size());
  // per tree: node count then (feature, threshold, left, right, count0, count1) per node
  std::vector<double> params;
  for (const auto& tree : model.trees()) {
    params.push_back(static_cast<double>(tree.nodes.size()));
    for (const auto& node : tree.nodes) {
      params.push_back(node.feature);
      params.push_back(node.threshold);
      params.push_back(node.left);
      params.push_back(node.right);
      params.push_back(node.count0);
      params.push_back(node.count1);
    }
  }
  write_container(path, header, params);
}

PolicyArtifact load_policy_artifact(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open policy artifact: " + path.string());
  std::string data((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());

  Reader r(data);
  const auto magic = r.bytes(sizeof(kMagic));
  if (std::memcmp(magic.data(), kMagic, sizeof(kMagic)) != 0) {
    throw ParseError("policy artifact: bad magic in " + path.string());
  }
  const uint32_t version = r.u32();
  if (version != kFormatVersion) {
    throw CompatibilityError("policy artifact: unsupported format version " + std::to_string(version));
  }
  const uint32_t header_len = r.u32();
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(r.bytes(header_len));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("policy artifact: bad header: ") + e.what());
  }

  if (header.value("format", "") != "alkit-policy") {
    throw CompatibilityError("not a policy artifact: " + path.string());
  }
  PolicyArtifact artifact;
  artifact.v_size = header.at("v_size").get<int>();
  artifact.feature_schema_version = header.at("feature_schema_version").get<int>();
  artifact.corpus_hash = header.at("corpus_hash").get<uint64_t>();
  artifact.hyperparameters_json = header.at("hyperparameters").dump();

  const uint64_t count = r.u64();
  if (count != static_cast<uint64_t>(rl::kParamCount)) {
    throw CompatibilityError("policy artifact: parameter count " + std::to_string(count) + " does not match schema");
  }
  artifact.theta.resize(count);
  for (uint64_t i = 0; i < count; ++i) artifact.theta[i] = r.f64();
  if (!r.exhausted()) throw ParseError("policy artifact: trailing bytes in " + path.string());
  for (double v : artifact.theta) {
    if (!std::isfinite(v)) throw ParseError("policy artifact: non-finite parameter");
  }
  return artifact;
}

}  // namespace alkit::strategies
