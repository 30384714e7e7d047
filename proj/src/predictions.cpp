#include "mltc/predictions.hpp"

#include <unordered_set>

#include "mltc/error.hpp"
#include "mltc/io.hpp"

namespace mltc {

using nlohmann::json;

PredictionSet parse_predictions(std::string_view content, const LabelVocabulary* vocab) {
  PredictionSet out;
  std::unordered_set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < content.size()) {
    std::size_t end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    const std::string where = "line " + std::to_string(line_no);
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(where + ": malformed JSON (" + e.what() + ")");
    }
    if (!obj.is_object()) throw Error(where + ": expected a JSON object");
    Prediction pred;
    auto id = obj.find("id");
    if (id == obj.end() || !id->is_string()) throw Error(where + ": missing string field 'id'");
    pred.id = id->get<std::string>();
    auto labels = obj.find("labels");
    if (labels == obj.end() || !labels->is_array()) {
      throw Error(where + ": missing list field 'labels'");
    }
    for (const auto& label : *labels) {
      if (!label.is_string()) throw Error(where + ": labels must be strings");
      pred.labels.insert(label.get<std::string>());
    }
    if (auto scores = obj.find("scores"); scores != obj.end() && !scores->is_null()) {
      if (!scores->is_object()) throw Error(where + ": 'scores' must be an object");
      std::map<std::string, double> parsed;
      for (const auto& [label, value] : scores->items()) {
        if (!value.is_number()) throw Error(where + ": score for '" + label + "' is not a number");
        parsed.emplace(label, value.get<double>());
      }
      pred.scores = std::move(parsed);
    }
    if (vocab != nullptr) {
      for (const auto& label : pred.labels) {
        if (!vocab->contains(label)) throw Error(where + ": unknown label '" + label + "'");
      }
      if (pred.scores) {
        for (const auto& [label, value] : *pred.scores) {
          if (!vocab->contains(label)) {
            throw Error(where + ": score given for unknown label '" + label + "'");
          }
        }
      }
    }
    if (!seen.insert(pred.id).second) throw Error(where + ": duplicate id '" + pred.id + "'");
    out.push_back(std::move(pred));
  }
  return out;
}

PredictionSet load_predictions(const std::filesystem::path& path, const LabelVocabulary* vocab) {
  const std::string content = io::read_file(path);
  try {
    return parse_predictions(content, vocab);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

std::string to_jsonl(const PredictionSet& predictions) {
  std::string out;
  for (const auto& pred : predictions) {
    nlohmann::ordered_json obj;
    obj["id"] = pred.id;
    obj["labels"] = pred.labels;
    if (pred.scores) obj["scores"] = *pred.scores;
    out += obj.dump(-1, ' ', false, json::error_handler_t::replace);
    out += '\n';
  }
  return out;
}

void save_predictions(const std::filesystem::path& path, const PredictionSet& predictions) {
  io::write_file_atomic(path, to_jsonl(predictions));
}

}  // namespace mltc
