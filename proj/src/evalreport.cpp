#include "phishbench/evalreport.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "json.hpp"
#include "phishbench/errors.hpp"
#include "phishbench/util.hpp"

namespace phishbench {
namespace {

using nlohmann::ordered_json;

constexpr const char* kAbsentMarkdown = "—";

std::string format_optional_percent(const std::optional<double>& ratio,
                                    const char* absent_marker) {
  return ratio ? format_percent(*ratio) : std::string(absent_marker);
}

ordered_json report_to_json(const ConditionReport& report) {
  ordered_json row = ordered_json::object();
  row["condition"] = std::string(condition_name(report.condition));
  row["detector"] = report.detector;
  row["tp"] = report.counts.tp;
  row["tn"] = report.counts.tn;
  row["fp"] = report.counts.fp;
  row["fn"] = report.counts.fn;
  row["errors"] = report.errors;
  const auto percent_or_null = [](const std::optional<double>& ratio) {
    return ratio ? ordered_json(format_percent(*ratio)) : ordered_json(nullptr);
  };
  row["accuracy"] = percent_or_null(report.metric_set.accuracy);
  row["precision"] = percent_or_null(report.metric_set.precision);
  row["recall"] = percent_or_null(report.metric_set.recall);
  row["f1"] = percent_or_null(report.metric_set.f1);
  return row;
}

/// Conditions in fixed display order, keeping only the ones present.
std::vector<Condition> conditions_in(const std::vector<ConditionReport>& reports) {
  std::vector<Condition> order = {Condition::Original, Condition::ZeroShotRephrased,
                                  Condition::FewShotRephrased};
  std::vector<Condition> present;
  for (Condition condition : order) {
    const bool found = std::any_of(reports.begin(), reports.end(),
                                   [&](const ConditionReport& report) {
                                     return report.condition == condition;
                                   });
    if (found) present.push_back(condition);
  }
  return present;
}

std::string render_markdown(const std::vector<ConditionReport>& reports) {
  std::string out = "# Detector evaluation\n";
  for (Condition condition : conditions_in(reports)) {
    out += "\n## ";
    out += condition_display_name(condition);
    out += "\n\n";
    out += "| Detector | TP | TN | FP | FN | Accuracy | Precision | Recall | F1 |\n";
    out += "|---|---:|---:|---:|---:|---:|---:|---:|---:|\n";
    std::vector<std::string> error_notes;
    for (const auto& report : reports) {
      if (report.condition != condition) continue;
      out += "| " + report.detector;
      out += " | " + std::to_string(report.counts.tp);
      out += " | " + std::to_string(report.counts.tn);
      out += " | " + std::to_string(report.counts.fp);
      out += " | " + std::to_string(report.counts.fn);
      out += " | " + format_optional_percent(report.metric_set.accuracy, kAbsentMarkdown);
      out += " | " + format_optional_percent(report.metric_set.precision, kAbsentMarkdown);
      out += " | " + format_optional_percent(report.metric_set.recall, kAbsentMarkdown);
      out += " | " + format_optional_percent(report.metric_set.f1, kAbsentMarkdown);
      out += " |\n";
      if (report.errors > 0) {
        error_notes.push_back(report.detector + ": " + std::to_string(report.errors) +
                              " record(s) could not be scored");
      }
    }
    for (const auto& note : error_notes) {
      out += "\n*" + note + "*\n";
    }
  }
  return out;
}

std::string render_csv(const std::vector<ConditionReport>& reports) {
  std::string out = "condition,detector,tp,tn,fp,fn,errors,accuracy,precision,recall,f1\n";
  for (Condition condition : conditions_in(reports)) {
    for (const auto& report : reports) {
      if (report.condition != condition) continue;
      out += std::string(condition_name(condition));
      out += "," + report.detector;
      out += "," + std::to_string(report.counts.tp);
      out += "," + std::to_string(report.counts.tn);
      out += "," + std::to_string(report.counts.fp);
      out += "," + std::to_string(report.counts.fn);
      out += "," + std::to_string(report.errors);
      out += "," + format_optional_percent(report.metric_set.accuracy, "");
      out += "," + format_optional_percent(report.metric_set.precision, "");
      out += "," + format_optional_percent(report.metric_set.recall, "");
      out += "," + format_optional_percent(report.metric_set.f1, "");
      out += "\n";
    }
  }
  return out;
}

std::string render_histogram_csv(const std::vector<BoundaryDistribution>& distributions) {
  std::string out = "bin_low,bin_high,count,condition\n";
  char buf[64];
  for (const auto& distribution : distributions) {
    const std::size_t bins = distribution.bins();
    for (std::size_t i = 0; i < bins; ++i) {
      const double low = static_cast<double>(i) / static_cast<double>(bins);
      const double high = static_cast<double>(i + 1) / static_cast<double>(bins);
      std::snprintf(buf, sizeof(buf), "%.4f,%.4f,", low, high);
      out += buf;
      out += std::to_string(distribution.histogram[i]);
      out += ",";
      out += condition_name(distribution.condition);
      out += "\n";
    }
  }
  return out;
}

}  // namespace

TallyResult tally(const std::vector<DetectorVerdict>& verdicts, const Corpus& corpus) {
  if (verdicts.size() != corpus.size()) {
    throw DataError("tally alignment: " + std::to_string(verdicts.size()) +
                    " verdicts for " + std::to_string(corpus.size()) + " records");
  }
  TallyResult result;
  const auto& records = corpus.records();
  for (std::size_t i = 0; i < verdicts.size(); ++i) {
    const auto& verdict = verdicts[i];
    const auto& record = records[i];
    if (verdict.id != record.id) {
      throw DataError("tally alignment: verdict " + std::to_string(i) + " is for id '" +
                      verdict.id + "' but the corpus record is '" + record.id + "'");
    }
    switch (verdict.decision) {
      case Decision::Phishing:
        record.label == Label::Phishing ? ++result.counts.tp : ++result.counts.fp;
        break;
      case Decision::Legitimate:
        record.label == Label::Legitimate ? ++result.counts.tn : ++result.counts.fn;
        break;
      case Decision::Undecided:
        // A phishing email nobody flagged got through, however the detector
        // arrived at its non-answer; an undecided legitimate email is not a
        // false alarm.
        record.label == Label::Phishing ? ++result.counts.fn : ++result.errors;
        break;
      case Decision::Error:
        ++result.errors;
        break;
    }
  }
  return result;
}

MetricSet metrics(const ConfusionCounts& counts) {
  MetricSet set;
  const std::size_t total = counts.total();
  if (total > 0) {
    set.accuracy = static_cast<double>(counts.tp + counts.tn) / static_cast<double>(total);
  }
  if (counts.tp + counts.fp > 0) {
    set.precision =
        static_cast<double>(counts.tp) / static_cast<double>(counts.tp + counts.fp);
  }
  if (counts.tp + counts.fn > 0) {
    set.recall = static_cast<double>(counts.tp) / static_cast<double>(counts.tp + counts.fn);
  }
  if (set.precision && set.recall && (*set.precision + *set.recall) > 0.0) {
    set.f1 = 2.0 * (*set.precision * *set.recall) / (*set.precision + *set.recall);
  }
  return set;
}

std::string format_percent(double ratio) {
  // Round the percentage to hundredths in one step; the default FP rounding
  // mode resolves exact halves to the even neighbor.
  const double scaled = std::nearbyint(ratio * 10000.0) / 100.0;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", scaled);
  return buf;
}

Condition parse_condition(std::string_view text) {
  if (text == "original") return Condition::Original;
  if (text == "zero_shot_rephrased") return Condition::ZeroShotRephrased;
  if (text == "few_shot_rephrased") return Condition::FewShotRephrased;
  throw ConfigError("unknown condition '" + std::string(text) +
                    "' (expected original, zero_shot_rephrased, or few_shot_rephrased)");
}

std::string_view condition_name(Condition condition) {
  switch (condition) {
    case Condition::Original: return "original";
    case Condition::ZeroShotRephrased: return "zero_shot_rephrased";
    case Condition::FewShotRephrased: return "few_shot_rephrased";
  }
  return "original";
}

std::string_view condition_display_name(Condition condition) {
  switch (condition) {
    case Condition::Original: return "Original";
    case Condition::ZeroShotRephrased: return "Zero-Shot Rephrased";
    case Condition::FewShotRephrased: return "Few-Shot Rephrased";
  }
  return "Original";
}

ConditionReport make_condition_report(std::string detector, Condition condition,
                                      const TallyResult& tallied) {
  ConditionReport report;
  report.detector = std::move(detector);
  report.condition = condition;
  report.counts = tallied.counts;
  report.errors = tallied.errors;
  report.metric_set = metrics(tallied.counts);
  return report;
}

BoundaryDistribution boundary_distribution(const TrainedModel& model,
                                           const EncoderBinding& binding,
                                           const Corpus& corpus, Condition condition,
                                           std::size_t bins) {
  if (model.kind() == ModelKind::LinearSvm) {
    throw ConfigError(
        "decision boundary distributions need class probabilities; the SVM margin is "
        "not one (use naive_bayes or logistic_regression)");
  }
  if (bins == 0) {
    throw ConfigError("boundary distribution needs at least one bin");
  }
  BoundaryDistribution distribution;
  distribution.model = std::string(model_kind_name(model.kind()));
  distribution.condition = condition;
  distribution.histogram.assign(bins, 0);
  double sum = 0.0;
  for (const auto& record : corpus.records()) {
    const double probability = model.score(binding.encode(record));
    distribution.probabilities.push_back(probability);
    sum += probability;
    std::size_t bin = static_cast<std::size_t>(probability * static_cast<double>(bins));
    if (bin >= bins) bin = bins - 1;  // probability 1.0 lands in the top bin
    ++distribution.histogram[bin];
  }
  distribution.mean =
      distribution.probabilities.empty()
          ? 0.0
          : sum / static_cast<double>(distribution.probabilities.size());
  return distribution;
}

std::vector<WordSensitivityRow> word_sensitivity_table(const TrainedModel& model,
                                                       const Vocabulary& vocab,
                                                       std::size_t top_k) {
  if (model.kind() == ModelKind::LinearSvm) {
    throw ConfigError(
        "word sensitivity needs class probabilities; the SVM margin is not one (use "
        "naive_bayes or logistic_regression)");
  }
  if (model.dimension() != vocab.size()) {
    throw DataError("word sensitivity: model dimension " +
                    std::to_string(model.dimension()) + " does not match vocabulary size " +
                    std::to_string(vocab.size()));
  }
  std::vector<WordSensitivityRow> rows;
  rows.reserve(vocab.size());
  for (std::uint32_t index = 0; index < vocab.size(); ++index) {
    WordSensitivityRow row;
    row.token = vocab.token_at(index);
    if (model.kind() == ModelKind::NaiveBayes) {
      row.phishing_probability = nb_word_posterior(model.nb(), index);
    } else {
      FeatureVector unit;
      unit.dimension = vocab.size();
      unit.entries = {{index, 1.0}};
      row.phishing_probability = lr_probability(model.lr(), unit);
    }
    rows.push_back(std::move(row));
  }
  std::sort(rows.begin(), rows.end(),
            [](const WordSensitivityRow& a, const WordSensitivityRow& b) {
              if (a.phishing_probability != b.phishing_probability) {
                return a.phishing_probability > b.phishing_probability;
              }
              return a.token < b.token;
            });
  if (rows.size() > top_k) rows.resize(top_k);
  return rows;
}

namespace {

Decision parse_decision(std::string_view text) {
  if (text == "phishing") return Decision::Phishing;
  if (text == "legitimate") return Decision::Legitimate;
  if (text == "undecided") return Decision::Undecided;
  if (text == "error") return Decision::Error;
  throw DataError("unknown decision '" + std::string(text) + "'");
}

}  // namespace

void write_verdicts(const VerdictFile& file, const std::filesystem::path& path) {
  ordered_json header = ordered_json::object();
  header["type"] = "verdicts";
  header["detector"] = file.detector;
  header["condition"] = std::string(condition_name(file.condition));
  header["corpus"] = file.corpus_name;
  header["records"] = file.verdicts.size();

  std::string out = header.dump() + "\n";
  for (const auto& verdict : file.verdicts) {
    ordered_json row = ordered_json::object();
    row["id"] = verdict.id;
    row["decision"] = std::string(decision_name(verdict.decision));
    row["score"] = verdict.score ? ordered_json(*verdict.score) : ordered_json(nullptr);
    row["rationale"] =
        verdict.rationale ? ordered_json(*verdict.rationale) : ordered_json(nullptr);
    if (verdict.votes) {
      ordered_json votes = ordered_json::array();
      for (Decision vote : *verdict.votes) {
        votes.push_back(std::string(decision_name(vote)));
      }
      row["votes"] = std::move(votes);
    } else {
      row["votes"] = nullptr;
    }
    out += row.dump() + "\n";
  }
  write_text_file(path, out);
}

VerdictFile read_verdicts(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  const auto lines = split_lines(text);
  if (lines.empty()) {
    throw DataError("verdict file " + path.string() + " is empty");
  }
  VerdictFile file;
  std::size_t line_number = 0;
  for (const auto& line : lines) {
    ++line_number;
    if (trim(line).empty()) continue;
    ordered_json value;
    try {
      value = ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError("verdict file " + path.string() + " line " +
                      std::to_string(line_number) + ": " + e.what());
    }
    if (line_number == 1) {
      if (value.value("type", "") != "verdicts") {
        throw DataError("verdict file " + path.string() +
                        " does not start with a verdicts header");
      }
      file.detector = value.value("detector", "");
      file.condition = parse_condition(value.value("condition", "original"));
      file.corpus_name = value.value("corpus", "");
      continue;
    }
    DetectorVerdict verdict;
    verdict.id = value.at("id").is_string() ? value.at("id").get<std::string>()
                                            : value.at("id").dump();
    verdict.decision = parse_decision(value.at("decision").get<std::string>());
    verdict.detector = file.detector;
    if (value.contains("score") && !value.at("score").is_null()) {
      verdict.score = value.at("score").get<double>();
    }
    if (value.contains("rationale") && !value.at("rationale").is_null()) {
      verdict.rationale = value.at("rationale").get<std::string>();
    }
    if (value.contains("votes") && !value.at("votes").is_null()) {
      std::vector<Decision> votes;
      for (const auto& vote : value.at("votes")) {
        votes.push_back(parse_decision(vote.get<std::string>()));
      }
      verdict.votes = std::move(votes);
    }
    file.verdicts.push_back(std::move(verdict));
  }
  return file;
}

ReportFormat parse_report_format(std::string_view text) {
  if (text == "markdown" || text == "md") return ReportFormat::Markdown;
  if (text == "csv") return ReportFormat::Csv;
  if (text == "json") return ReportFormat::Json;
  throw ConfigError("unknown report format '" + std::string(text) +
                    "' (expected markdown, csv, or json)");
}

std::vector<std::filesystem::path> emit_report(
    const std::vector<ConditionReport>& reports,
    const std::vector<BoundaryDistribution>& distributions, ReportFormat format,
    const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> written;
  std::filesystem::path report_path = dir;
  switch (format) {
    case ReportFormat::Markdown:
      report_path /= "report.md";
      write_text_file(report_path, render_markdown(reports));
      break;
    case ReportFormat::Csv:
      report_path /= "report.csv";
      write_text_file(report_path, render_csv(reports));
      break;
    case ReportFormat::Json: {
      report_path /= "report.json";
      ordered_json rows = ordered_json::array();
      for (Condition condition : conditions_in(reports)) {
        for (const auto& report : reports) {
          if (report.condition == condition) rows.push_back(report_to_json(report));
        }
      }
      write_text_file(report_path, rows.dump(2) + "\n");
      break;
    }
  }
  written.push_back(report_path);

  if (!distributions.empty()) {
    const std::filesystem::path histogram_path = dir / "boundary_histogram.csv";
    write_text_file(histogram_path, render_histogram_csv(distributions));
    written.push_back(histogram_path);
  }
  return written;
}

}  // namespace phishbench
