#include "rlcache/checkpoint.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace rlcache {

namespace {

constexpr const char* kFormat = "rlcache-mlp";
constexpr int kVersion = 1;

}  // namespace

std::string checkpoint_to_json(const Mlp<double>& net) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& p : net.params()) {
    std::vector<double> data(p.data(), p.data() + p.size());
    layers.push_back({{"rows", p.rows()}, {"cols", p.cols()}, {"data", std::move(data)}});
  }
  nlohmann::json doc{{"format", kFormat}, {"version", kVersion}, {"layers", std::move(layers)}};
  return doc.dump();
}

void checkpoint_from_json(Mlp<double>& net, const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("checkpoint: ") + e.what());
  }
  if (doc.value("format", "") != kFormat) throw std::invalid_argument("checkpoint: unknown format");
  if (doc.value("version", 0) != kVersion) throw std::invalid_argument("checkpoint: unsupported version");
  const auto& layers = doc.at("layers");
  auto& params = net.params();
  if (!layers.is_array() || layers.size() != params.size()) throw std::invalid_argument("checkpoint: layer count mismatch");
  std::vector<Mat<double>> loaded;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& l = layers[i];
    const auto rows = l.at("rows").get<Eigen::Index>();
    const auto cols = l.at("cols").get<Eigen::Index>();
    const auto data = l.at("data").get<std::vector<double>>();
    if (rows != params[i].rows() || cols != params[i].cols() || static_cast<Eigen::Index>(data.size()) != rows * cols) {
      throw std::invalid_argument("checkpoint: shape mismatch in layer " + std::to_string(i));
    }
    loaded.push_back(Eigen::Map<const Mat<double>>(data.data(), rows, cols));
  }
  params = std::move(loaded);
}

void save_checkpoint(const Mlp<double>& net, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint " + path);
  out << checkpoint_to_json(net);
}

void load_checkpoint(Mlp<double>& net, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read checkpoint " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  checkpoint_from_json(net, ss.str());
}

}  // namespace rlcache
