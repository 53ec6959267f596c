#include "evade/serialize.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

#include "evade/forest.hpp"
#include "evade/linear.hpp"
#include "evade/mlp.hpp"

namespace evade {

namespace {

constexpr char kMagic[4] = {'E', 'V', 'M', 'D'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& out, const T& value) {
  static_assert(std::is_trivially_copyable_v<T>);
  out.write(reinterpret_cast<const char*>(&value), sizeof value);
}

template <typename T>
T get(std::istream& in) {
  T value;
  in.read(reinterpret_cast<char*>(&value), sizeof value);
  if (!in) throw std::runtime_error("truncated model file");
  return value;
}

void put_doubles(std::ostream& out, const std::vector<double>& v) {
  put<std::uint64_t>(out, v.size());
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
}

std::vector<double> get_doubles(std::istream& in) {
  const auto n = get<std::uint64_t>(in);
  std::vector<double> v(n);
  in.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(n * sizeof(double)));
  if (!in) throw std::runtime_error("truncated model file");
  return v;
}

void put_config(std::ostream& out, const TrainConfig& c) {
  put<std::uint64_t>(out, c.n_trees);
  put<std::uint64_t>(out, c.max_split_features);
  put<std::uint64_t>(out, c.max_depth);
  put<std::uint64_t>(out, c.min_leaf);
  put<std::uint8_t>(out, c.bootstrap ? 1 : 0);
  put<double>(out, c.learning_rate);
  put<std::uint64_t>(out, c.epochs);
  put<std::uint64_t>(out, c.batch_size);
  put<double>(out, c.regularization);
  put<std::uint64_t>(out, c.hidden_units);
  put<std::uint64_t>(out, c.seed);
}

TrainConfig get_config(std::istream& in) {
  TrainConfig c;
  c.n_trees = get<std::uint64_t>(in);
  c.max_split_features = get<std::uint64_t>(in);
  c.max_depth = get<std::uint64_t>(in);
  c.min_leaf = get<std::uint64_t>(in);
  c.bootstrap = get<std::uint8_t>(in) != 0;
  c.learning_rate = get<double>(in);
  c.epochs = get<std::uint64_t>(in);
  c.batch_size = get<std::uint64_t>(in);
  c.regularization = get<double>(in);
  c.hidden_units = get<std::uint64_t>(in);
  c.seed = get<std::uint64_t>(in);
  return c;
}

void put_tree(std::ostream& out, const DecisionTree& tree) {
  put<std::uint64_t>(out, tree.nodes().size());
  for (const auto& n : tree.nodes()) {
    put<std::int32_t>(out, n.feature);
    put<std::uint32_t>(out, n.zero_child);
    put<std::uint32_t>(out, n.one_child);
    put<double>(out, n.p_malware);
  }
}

DecisionTree get_tree(std::istream& in, std::size_t dim) {
  const auto count = get<std::uint64_t>(in);
  std::vector<TreeNode> nodes(count);
  for (auto& n : nodes) {
    n.feature = get<std::int32_t>(in);
    n.zero_child = get<std::uint32_t>(in);
    n.one_child = get<std::uint32_t>(in);
    n.p_malware = get<double>(in);
  }
  return DecisionTree(std::move(nodes), dim);
}

}  // namespace

void save_model(const Classifier& model, const TrainConfig& config,
                const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, kVersion);
  put<std::uint8_t>(out, static_cast<std::uint8_t>(model.kind()));
  put_config(out, config);
  put<std::uint64_t>(out, model.dim());

  if (const auto* tree = dynamic_cast<const DecisionTree*>(&model)) {
    put_tree(out, *tree);
  } else if (const auto* ens = dynamic_cast<const TreeEnsemble*>(&model)) {
    put<std::uint64_t>(out, ens->trees().size());
    for (const auto& t : ens->trees()) put_tree(out, t);
  } else if (const auto* lin = dynamic_cast<const LinearModel*>(&model)) {
    put_doubles(out, lin->discriminator().w);
    put<double>(out, lin->discriminator().b);
  } else if (const auto* mlp = dynamic_cast<const MlpClassifier*>(&model)) {
    const MlpModel& net = mlp->net();
    put<std::uint64_t>(out, net.input_dim);
    put<std::uint64_t>(out, net.hidden);
    put_doubles(out, net.w1);
    put_doubles(out, net.b1);
    put_doubles(out, net.w2);
    put_doubles(out, net.b2);
    put_doubles(out, net.w3);
    put_doubles(out, net.b3);
  } else {
    throw std::logic_error("unserializable model type");
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

SavedModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  char magic[4];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw std::runtime_error(path + ": not a model file");
  }
  const auto version = get<std::uint32_t>(in);
  if (version != kVersion) {
    throw std::runtime_error(path + ": unsupported model version " +
                             std::to_string(version));
  }
  const auto kind = static_cast<ModelKind>(get<std::uint8_t>(in));

  SavedModel saved;
  saved.config = get_config(in);
  const auto dim = get<std::uint64_t>(in);

  switch (kind) {
    case ModelKind::tree:
      saved.model = std::make_shared<DecisionTree>(get_tree(in, dim));
      break;
    case ModelKind::forest:
    case ModelKind::bagging: {
      const auto count = get<std::uint64_t>(in);
      std::vector<DecisionTree> trees;
      trees.reserve(count);
      for (std::uint64_t i = 0; i < count; ++i) trees.push_back(get_tree(in, dim));
      saved.model =
          std::make_shared<TreeEnsemble>(kind, std::move(trees), dim);
      break;
    }
    case ModelKind::svm:
    case ModelKind::logreg: {
      LinearDiscriminator d;
      d.w = get_doubles(in);
      d.b = get<double>(in);
      saved.model = make_linear_classifier(std::move(d), kind);
      break;
    }
    case ModelKind::mlp: {
      MlpModel net;
      net.input_dim = get<std::uint64_t>(in);
      net.hidden = get<std::uint64_t>(in);
      net.w1 = get_doubles(in);
      net.b1 = get_doubles(in);
      net.w2 = get_doubles(in);
      net.b2 = get_doubles(in);
      net.w3 = get_doubles(in);
      net.b3 = get_doubles(in);
      saved.model = std::make_shared<MlpClassifier>(std::move(net));
      break;
    }
    default:
      throw std::runtime_error(path + ": unknown model kind byte");
  }
  return saved;
}

}  // namespace evade
