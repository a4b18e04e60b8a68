#include <algorithm>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "sanid/error.hpp"
#include "sanid/evaluation.hpp"

namespace sanid {
namespace {

using nlohmann::json;

std::string fixed(double value, int decimals) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.*f", decimals, value);
  return buffer;
}

std::string pad_left(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string pad_right(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

}  // namespace

std::string format_summary_row(const EvalReport& report) {
  return "Acc(%) " + fixed(100.0 * report.accuracy, 1) + "  F1-s. " + fixed(report.overall_f1, 2);
}

std::string emit_text(const EvalReport& r) {
  std::ostringstream out;
  for (const auto& [key, value] : r.metadata) out << key << ": " << value << '\n';
  out << format_summary_row(r) << '\n';
  out << "micro F1 " << fixed(r.micro_f1, 2) << "  macro F1 " << fixed(r.macro_f1, 2)
      << "  overall F1 " << fixed(r.overall_f1, 2) << "\n\n";

  const auto& labels = r.confusion.labels();
  std::size_t name_width = 6;
  for (const auto& l : labels) name_width = std::max(name_width, l.size());

  out << pad_right("intent", name_width) << "  precision  recall     F1  support\n";
  for (std::size_t k = 0; k < r.per_class.size(); ++k) {
    const auto& m = r.per_class[k];
    out << pad_right(labels[k], name_width) << "  " << pad_left(fixed(m.precision, 2), 9)
        << "  " << pad_left(fixed(m.recall, 2), 6) << "  " << pad_left(fixed(m.f1, 2), 5)
        << "  " << pad_left(std::to_string(m.support), 7) << '\n';
  }

  out << "\nconfusion (rows gold, columns predicted)\n";
  std::vector<std::size_t> widths;
  for (std::size_t p = 0; p < labels.size(); ++p) {
    std::size_t w = labels[p].size();
    for (std::size_t g = 0; g < labels.size(); ++g) {
      w = std::max(w, std::to_string(r.confusion.at(g, p)).size());
    }
    widths.push_back(w);
  }
  out << std::string(name_width, ' ');
  for (std::size_t p = 0; p < labels.size(); ++p) out << "  " << pad_left(labels[p], widths[p]);
  out << '\n';
  for (std::size_t g = 0; g < labels.size(); ++g) {
    out << pad_right(labels[g], name_width);
    for (std::size_t p = 0; p < labels.size(); ++p) {
      out << "  " << pad_left(std::to_string(r.confusion.at(g, p)), widths[p]);
    }
    out << '\n';
  }
  return out.str();
}

std::string emit_json(const EvalReport& r) {
  json j;
  j["accuracy"] = r.accuracy;
  j["micro_f1"] = r.micro_f1;
  j["macro_f1"] = r.macro_f1;
  j["overall_f1"] = r.overall_f1;
  j["labels"] = r.confusion.labels();
  json matrix = json::array();
  for (std::size_t g = 0; g < r.confusion.classes(); ++g) {
    json row = json::array();
    for (std::size_t p = 0; p < r.confusion.classes(); ++p) row.push_back(r.confusion.at(g, p));
    matrix.push_back(row);
  }
  j["confusion"] = matrix;
  json per_class = json::array();
  for (std::size_t k = 0; k < r.per_class.size(); ++k) {
    const auto& m = r.per_class[k];
    per_class.push_back({{"label", r.confusion.labels()[k]},
                         {"precision", m.precision},
                         {"recall", m.recall},
                         {"f1", m.f1},
                         {"support", m.support}});
  }
  j["per_class"] = per_class;
  j["metadata"] = r.metadata;
  return j.dump();
}

EvalReport parse_json_report(const std::string& line) {
  try {
    const json j = json::parse(line);
    EvalReport r;
    r.accuracy = j.at("accuracy").get<double>();
    r.micro_f1 = j.at("micro_f1").get<double>();
    r.macro_f1 = j.at("macro_f1").get<double>();
    r.overall_f1 = j.at("overall_f1").get<double>();
    r.confusion = ConfusionMatrix(j.at("labels").get<std::vector<std::string>>());
    const auto& matrix = j.at("confusion");
    if (matrix.size() != r.confusion.classes()) fail(ErrorKind::kData, "confusion row count");
    for (std::size_t g = 0; g < matrix.size(); ++g) {
      if (matrix[g].size() != r.confusion.classes()) fail(ErrorKind::kData, "confusion column count");
      for (std::size_t p = 0; p < matrix[g].size(); ++p) {
        r.confusion.add(g, p, matrix[g][p].get<std::uint64_t>());
      }
    }
    for (const auto& m : j.at("per_class")) {
      r.per_class.push_back({m.at("precision").get<double>(), m.at("recall").get<double>(),
                             m.at("f1").get<double>(), m.at("support").get<std::uint64_t>()});
    }
    r.metadata = j.at("metadata").get<std::map<std::string, std::string>>();
    return r;
  } catch (const json::exception& e) {
    fail(ErrorKind::kData, std::string("malformed report: ") + e.what());
  }
}

}  // namespace sanid
