#include "mltc/baseline.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>

#include "mltc/error.hpp"
#include "mltc/hash.hpp"
#include "mltc/io.hpp"
#include "mltc/metrics.hpp"
#include "mltc/version.hpp"

namespace mltc {

using nlohmann::json;

namespace {

constexpr std::string_view kModelMagic = "MLTCLINM";

std::vector<std::string> texts_of(const Dataset& dataset) {
  std::vector<std::string> texts;
  texts.reserve(dataset.size());
  for (const auto& ex : dataset) texts.push_back(ex.text);
  return texts;
}

std::vector<MultiHot> targets_of(const Dataset& dataset, const LabelVocabulary& vocab) {
  std::vector<MultiHot> rows;
  rows.reserve(dataset.size());
  for (const auto& ex : dataset) rows.push_back(encode(ex.labels, vocab));
  return rows;
}

double micro_f1_at(const ScaledWeights& weights, std::span<const SparseVector> x,
                   std::span<const MultiHot> y, const LabelVocabulary& vocab, double threshold) {
  const std::size_t n_labels = vocab.size();
  const auto probs = kernels::omp::probabilities(weights.stored, x, weights.scale);
  std::vector<MultiHot> chosen;
  chosen.reserve(x.size());
  for (std::size_t e = 0; e < x.size(); ++e) {
    const std::span<const double> row(probs.data() + e * n_labels, n_labels);
    chosen.push_back(encode(decide(row, vocab, threshold), vocab));
  }
  return micro_f1(confusion(y, chosen, n_labels));
}

// Unbiased enough for shuffling; mt19937_64's output sequence is fixed by the
// standard, unlike std::shuffle's use of it.
void shuffle(std::vector<std::size_t>& order, std::mt19937_64& rng) {
  for (std::size_t i = order.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
}

template <typename T>
void put(std::string& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  const U bits = std::bit_cast<U>(value);
  for (std::size_t k = 0; k < sizeof(T); ++k) out.push_back(static_cast<char>((bits >> (8 * k)) & 0xFF));
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
    need(sizeof(T));
    U bits = 0;
    for (std::size_t k = 0; k < sizeof(T); ++k) {
      bits |= static_cast<U>(static_cast<std::uint8_t>(bytes_[pos_ + k])) << (8 * k);
    }
    pos_ += sizeof(T);
    return std::bit_cast<T>(bits);
  }

  std::string_view take(std::size_t n) {
    need(n);
    auto out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  bool done() const noexcept { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw Error("model file is truncated");
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

void validate(const TrainConfig& config) {
  validate(config.features);
  if (!(config.learning_rate > 0.0) || !std::isfinite(config.learning_rate)) {
    throw Error("learning rate must be positive");
  }
  if (!(config.l2 >= 0.0) || !std::isfinite(config.l2)) throw Error("l2 must be >= 0");
  if (2.0 * config.learning_rate * config.l2 >= 1.0) {
    throw Error("learning_rate * l2 must be below 0.5");
  }
  if (!(config.threshold >= 0.0 && config.threshold <= 1.0)) {
    throw Error("threshold must lie in [0, 1]");
  }
  if (config.batch_size < 1) throw Error("batch size must be at least 1");
}

json to_json(const TrainConfig& config) {
  return {{"dim", config.features.dim},
          {"ngram_min", config.features.ngram_min},
          {"ngram_max", config.features.ngram_max},
          {"seed", config.seed},
          {"learning_rate", config.learning_rate},
          {"epochs", config.epochs},
          {"l2", config.l2},
          {"threshold", config.threshold},
          {"batch_size", config.batch_size}};
}

TrainConfig train_config_from_json(const json& in) {
  TrainConfig c;
  c.features.dim = in.at("dim").get<std::size_t>();
  c.features.ngram_min = in.at("ngram_min").get<std::size_t>();
  c.features.ngram_max = in.at("ngram_max").get<std::size_t>();
  c.seed = in.at("seed").get<std::uint64_t>();
  c.learning_rate = in.at("learning_rate").get<double>();
  c.epochs = in.at("epochs").get<std::size_t>();
  c.l2 = in.at("l2").get<double>();
  c.threshold = in.at("threshold").get<double>();
  c.batch_size = in.at("batch_size").get<std::size_t>();
  return c;
}

LabelSet decide(std::span<const double> probabilities, const LabelVocabulary& vocab,
                double threshold) {
  if (probabilities.size() != vocab.size()) throw Error("score row does not match vocabulary");
  LabelSet chosen;
  std::size_t best = 0;
  for (std::size_t l = 0; l < probabilities.size(); ++l) {
    if (probabilities[l] >= threshold) chosen.insert(vocab.at(l));
    if (probabilities[l] > probabilities[best]) best = l;
  }
  if (chosen.empty() && !probabilities.empty()) chosen.insert(vocab.at(best));
  return chosen;
}

TrainResult train(const Dataset& train_set, const Dataset& valid_set,
                  const LabelVocabulary& vocab, const TrainConfig& config) {
  validate(config);
  if (train_set.empty()) throw Error("training split is empty");
  if (valid_set.empty()) throw Error("validation split is empty");
  if (vocab.empty()) throw Error("label vocabulary is empty");

  const auto train_text = texts_of(train_set);
  const auto valid_text = texts_of(valid_set);
  const auto x = kernels::omp::featurize_batch(train_text, config.features);
  const auto y = targets_of(train_set, vocab);
  const auto vx = kernels::omp::featurize_batch(valid_text, config.features);
  const auto vy = targets_of(valid_set, vocab);

  ScaledWeights weights{Weights(vocab.size(), config.features.dim), 1.0};
  TrainResult result;
  result.model.config = config;
  result.model.vocab = vocab;
  result.model.weights = weights.stored;
  result.history.push_back({0, kernels::omp::bce_loss(weights, x, y, config.l2),
                            micro_f1_at(weights, vx, vy, vocab, config.threshold)});

  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<SparseVector> batch_x;
  std::vector<MultiHot> batch_y;
  double best_f1 = result.history.front().valid_micro_f1;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    shuffle(order, rng);
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      batch_x.clear();
      batch_y.clear();
      for (std::size_t i = start; i < end; ++i) {
        batch_x.push_back(x[order[i]]);
        batch_y.push_back(y[order[i]]);
      }
      kernels::omp::sgd_step(weights, batch_x, batch_y, config.learning_rate, config.l2);
      if (weights.scale < 1e-4) weights.fold();
    }

    EpochRecord record{epoch, kernels::omp::bce_loss(weights, x, y, config.l2),
                       micro_f1_at(weights, vx, vy, vocab, config.threshold)};
    result.history.push_back(record);
    if (record.valid_micro_f1 > best_f1) {
      best_f1 = record.valid_micro_f1;
      result.best_epoch = epoch;
      result.model.weights = weights.materialized();
    }
  }
  return result;
}

PredictionSet predict(const LinearModel& model, const Dataset& dataset,
                      const LabelVocabulary* vocab) {
  if (vocab != nullptr && vocab->hash() != model.vocab.hash()) {
    throw Error("label vocabulary does not match the one the model was trained with (hash " +
                hex64(vocab->hash()) + " vs " + hex64(model.vocab.hash()) + ")");
  }
  const std::size_t n_labels = model.vocab.size();
  const auto x = kernels::omp::featurize_batch(texts_of(dataset), model.config.features);
  const auto probs = kernels::omp::probabilities(model.weights, x);

  PredictionSet out;
  out.reserve(dataset.size());
  for (std::size_t e = 0; e < dataset.size(); ++e) {
    const std::span<const double> row(probs.data() + e * n_labels, n_labels);
    Prediction p;
    p.id = dataset[e].id;
    p.labels = decide(row, model.vocab, model.config.threshold);
    std::map<std::string, double> scores;
    for (std::size_t l = 0; l < n_labels; ++l) scores.emplace(model.vocab.at(l), row[l]);
    p.scores = std::move(scores);
    out.push_back(std::move(p));
  }
  return out;
}

std::string serialize_model(const LinearModel& model) {
  const Weights& w = model.weights;
  if (w.n_labels != model.vocab.size() || w.w.size() != w.n_labels * w.dim ||
      w.b.size() != w.n_labels || w.dim != model.config.features.dim) {
    throw Error("model shape is inconsistent with its vocabulary or config");
  }
  json header;
  header["config"] = to_json(model.config);
  header["labels"] = model.vocab.labels();
  header["vocab_hash"] = hex64(model.vocab.hash());
  header["n_labels"] = w.n_labels;
  header["dim"] = w.dim;
  const std::string header_text = header.dump();

  std::string out(kModelMagic);
  put<std::uint32_t>(out, kModelFormatVersion);
  put<std::uint64_t>(out, header_text.size());
  out += header_text;
  for (std::size_t l = 0; l < w.n_labels; ++l) {
    const auto row = w.row(l);
    put<double>(out, w.b[l]);
    const auto nnz = static_cast<std::uint64_t>(
        std::count_if(row.begin(), row.end(), [](double v) { return v != 0.0; }));
    put<std::uint64_t>(out, nnz);
    for (std::size_t j = 0; j < w.dim; ++j) {
      if (row[j] == 0.0) continue;
      put<std::uint32_t>(out, static_cast<std::uint32_t>(j));
      put<double>(out, row[j]);
    }
  }
  return out;
}

LinearModel deserialize_model(std::string_view bytes) {
  Reader in(bytes);
  if (in.take(kModelMagic.size()) != kModelMagic) throw Error("not a model file (bad magic)");
  const auto version = in.get<std::uint32_t>();
  if (version != static_cast<std::uint32_t>(kModelFormatVersion)) {
    throw Error("unsupported model format version " + std::to_string(version));
  }
  const auto header_size = in.get<std::uint64_t>();
  json header;
  LinearModel model;
  try {
    header = json::parse(in.take(header_size));
    model.config = train_config_from_json(header.at("config"));
    model.vocab = LabelVocabulary(header.at("labels").get<std::vector<std::string>>());
    if (header.at("vocab_hash").get<std::string>() != hex64(model.vocab.hash())) {
      throw Error("stored vocabulary hash does not match stored labels");
    }
  } catch (const json::exception& e) {
    throw Error(std::string("malformed model header: ") + e.what());
  }
  validate(model.config.features);
  model.weights = Weights(model.vocab.size(), model.config.features.dim);
  Weights& w = model.weights;
  for (std::size_t l = 0; l < w.n_labels; ++l) {
    w.b[l] = in.get<double>();
    const auto nnz = in.get<std::uint64_t>();
    if (nnz > w.dim) throw Error("corrupt model: too many weights in row " + std::to_string(l));
    auto row = w.row(l);
    for (std::uint64_t k = 0; k < nnz; ++k) {
      const auto j = in.get<std::uint32_t>();
      const auto value = in.get<double>();
      if (j >= w.dim) throw Error("corrupt model: weight index out of range");
      if (!std::isfinite(value)) throw Error("corrupt model: non-finite weight");
      row[j] = value;
    }
    if (!std::isfinite(w.b[l])) throw Error("corrupt model: non-finite bias");
  }
  if (!in.done()) throw Error("corrupt model: trailing bytes");
  return model;
}

void save_model(const std::filesystem::path& path, const LinearModel& model) {
  io::write_file_atomic(path, serialize_model(model));
}

LinearModel load_model(const std::filesystem::path& path) {
  try {
    return deserialize_model(io::read_file(path));
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

}  // namespace mltc
