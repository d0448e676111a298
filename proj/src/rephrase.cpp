#include "phishbench/rephrase.hpp"

#include <algorithm>
#include <cctype>

#include "json.hpp"
#include "phishbench/errors.hpp"
#include "phishbench/textenc.hpp"
#include "phishbench/util.hpp"

namespace phishbench {
namespace {

using nlohmann::ordered_json;

constexpr std::string_view kFormatReminder =
    "Respond with a 'Subject:' line followed by a 'Body:' section.";

bool starts_with_ci(std::string_view text, std::string_view prefix) {
  if (text.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(text[i])) !=
        std::tolower(static_cast<unsigned char>(prefix[i]))) {
      return false;
    }
  }
  return true;
}

bool is_fence_line(std::string_view line) {
  const auto trimmed = trim(line);
  return trimmed.size() >= 3 && trimmed.substr(0, 3) == "```";
}

bool is_all_digits(std::string_view token) {
  return !token.empty() &&
         std::all_of(token.begin(), token.end(),
                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

/// Currency symbol (possibly multi-byte) starting at text[i], followed by
/// optional whitespace and a digit.
bool currency_symbol_at(std::string_view text, std::size_t i, std::size_t* symbol_len) {
  if (text[i] == '$') {
    *symbol_len = 1;
    return true;
  }
  if (i + 2 < text.size() && static_cast<unsigned char>(text[i]) == 0xE2 &&
      static_cast<unsigned char>(text[i + 1]) == 0x82 &&
      static_cast<unsigned char>(text[i + 2]) == 0xAC) {
    *symbol_len = 3;  // Euro sign
    return true;
  }
  if (i + 1 < text.size() && static_cast<unsigned char>(text[i]) == 0xC2 &&
      static_cast<unsigned char>(text[i + 1]) == 0xA3) {
    *symbol_len = 2;  // Pound sign
    return true;
  }
  return false;
}

bool mentions_currency(const std::string& text) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    std::size_t symbol_len = 0;
    if (!currency_symbol_at(text, i, &symbol_len)) continue;
    std::size_t j = i + symbol_len;
    while (j < text.size() && std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) return true;
  }

  TokenizerConfig tokenizer;
  tokenizer.min_token_length = 1;
  const auto tokens = tokenize(text, tokenizer);
  const auto is_currency_word = [](const std::string& token) {
    return token == "dollars" || token == "dollar" || token == "usd";
  };
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!is_all_digits(tokens[i])) continue;
    if (i + 1 < tokens.size() && is_currency_word(tokens[i + 1])) return true;
    if (i > 0 && is_currency_word(tokens[i - 1])) return true;
  }
  return false;
}

/// Name-like tokens from the receiver's local part: split on anything that
/// is not a letter, drop single characters.
std::vector<std::string> greeting_tokens(const std::string& receiver) {
  const auto at = receiver.find('@');
  const std::string local = receiver.substr(0, at == std::string::npos ? receiver.size() : at);
  std::vector<std::string> out;
  std::string current;
  const auto flush = [&] {
    if (current.size() >= 2) out.push_back(current);
    current.clear();
  };
  for (char c : local) {
    if (std::isalpha(static_cast<unsigned char>(c))) {
      current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else {
      flush();
    }
  }
  flush();
  return out;
}

std::string corrective_suffix(const std::vector<std::string>& failed_rules) {
  std::string text = "\n\nThe previous attempt failed these checks: ";
  text += join(failed_rules, ", ");
  text += ". Revise the rewrite to satisfy them and respond again with a "
          "'Subject:' line followed by a 'Body:' section.";
  return text;
}

EmailRecord shot_record(const ordered_json& value, const std::filesystem::path& path,
                        std::size_t line_number) {
  if (!value.is_object()) {
    throw DataError("shot file " + path.string() + " line " + std::to_string(line_number) +
                    ": 'original' must be an object");
  }
  EmailRecord record;
  record.sender = value.value("sender", "");
  record.receiver = value.value("receiver", "");
  record.subject = value.value("subject", "");
  record.body = value.value("body", "");
  record.label = Label::Phishing;
  return record;
}

}  // namespace

PromptCondition parse_prompt_condition(std::string_view text) {
  if (text == "zero_shot") return PromptCondition::ZeroShot;
  if (text == "few_shot") return PromptCondition::FewShot;
  throw ConfigError("unknown prompt condition '" + std::string(text) +
                    "' (expected zero_shot or few_shot)");
}

std::string_view prompt_condition_name(PromptCondition condition) {
  return condition == PromptCondition::ZeroShot ? "zero_shot" : "few_shot";
}

Provenance provenance_for(PromptCondition condition) {
  return condition == PromptCondition::ZeroShot ? Provenance::ZeroShotRephrased
                                                : Provenance::FewShotRephrased;
}

PromptTemplate PromptTemplate::zero_shot() {
  PromptTemplate tmpl;
  tmpl.kind = PromptCondition::ZeroShot;
  tmpl.instruction = prompts::kRephraseInstruction;
  return tmpl;
}

PromptTemplate PromptTemplate::few_shot() { return few_shot(prompts::default_shots()); }

PromptTemplate PromptTemplate::few_shot(std::vector<prompts::ShotPair> shots) {
  PromptTemplate tmpl;
  tmpl.kind = PromptCondition::FewShot;
  tmpl.instruction = prompts::kRephraseInstruction;
  tmpl.shots = std::move(shots);
  return tmpl;
}

void PromptTemplate::validate() const {
  if (kind == PromptCondition::ZeroShot && !shots.empty()) {
    throw ConfigError("zero-shot prompt template must not carry example pairs (got " +
                      std::to_string(shots.size()) + ")");
  }
  if (kind == PromptCondition::FewShot && shots.size() != 3) {
    throw ConfigError("few-shot prompt template requires exactly 3 example pairs (got " +
                      std::to_string(shots.size()) + ")");
  }
  if (instruction.empty()) {
    throw ConfigError("prompt template instruction must not be empty");
  }
}

std::vector<prompts::ShotPair> load_shots(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  std::vector<prompts::ShotPair> shots;
  std::size_t line_number = 0;
  for (const auto& line : split_lines(text)) {
    ++line_number;
    if (trim(line).empty()) continue;
    ordered_json value;
    try {
      value = ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError("shot file " + path.string() + " line " + std::to_string(line_number) +
                      ": " + e.what());
    }
    if (!value.is_object() || !value.contains("original") || !value.contains("subject") ||
        !value.contains("body")) {
      throw DataError("shot file " + path.string() + " line " + std::to_string(line_number) +
                      ": expected keys original, subject, body");
    }
    prompts::ShotPair shot;
    shot.original = shot_record(value.at("original"), path, line_number);
    shot.rephrased_subject = value.at("subject").get<std::string>();
    shot.rephrased_body = value.at("body").get<std::string>();
    shots.push_back(std::move(shot));
  }
  if (shots.empty()) {
    throw DataError("shot file " + path.string() + " contains no example pairs");
  }
  return shots;
}

RenderedPrompt render_prompt(const PromptTemplate& tmpl, const EmailRecord& email) {
  tmpl.validate();
  std::string user = tmpl.instruction;
  user += "\n\n";
  for (const auto& shot : tmpl.shots) {
    user += "ORIGINAL:\n";
    user += prompts::render_email_fields(shot.original);
    user += "\nREPHRASED:\nSubject: ";
    user += shot.rephrased_subject;
    user += "\nBody:\n";
    user += shot.rephrased_body;
    user += "\n\n";
  }
  user += "EMAIL TO REPHRASE:\n";
  user += prompts::render_email_fields(email);
  user += "\n";
  user += kFormatReminder;
  return RenderedPrompt{prompts::kRephraseSystem, std::move(user)};
}

std::pair<std::string, std::string> parse_rephrase_response(const std::string& text) {
  const std::vector<std::string> lines = split_lines(text);
  std::optional<std::string> subject;
  std::string body;
  bool in_body = false;
  bool body_seen = false;
  for (const auto& line : lines) {
    if (is_fence_line(line)) continue;
    if (!subject) {
      const auto trimmed = trim(line);
      if (starts_with_ci(trimmed, "subject:")) {
        subject = std::string(trim(trimmed.substr(8)));
      }
      continue;
    }
    if (!in_body) {
      const auto trimmed = trim(line);
      if (starts_with_ci(trimmed, "body:")) {
        in_body = true;
        body_seen = true;
        const auto rest = trim(trimmed.substr(5));
        if (!rest.empty()) body.append(rest);
      }
      continue;
    }
    if (!body.empty()) body.push_back('\n');
    body.append(line);
  }
  if (!subject) {
    throw ParseError("rephrase response has no 'Subject:' line", text);
  }
  if (!body_seen) {
    throw ParseError("rephrase response has no 'Body:' section", text);
  }
  while (!body.empty() && (body.back() == '\n' || body.back() == ' ' || body.back() == '\t' ||
                           body.back() == '\r')) {
    body.pop_back();
  }
  return {std::move(*subject), std::move(body)};
}

std::vector<std::string> ValidationReport::failed_rules() const {
  std::vector<std::string> rules;
  if (!no_urgency_words) rules.push_back("no_urgency_words");
  if (!no_currency_amounts) rules.push_back("no_currency_amounts");
  if (!personalized_greeting) rules.push_back("personalized_greeting");
  if (!nonempty_subject_and_body) rules.push_back("nonempty_subject_and_body");
  return rules;
}

ValidationReport validate(const RephrasedOutput& output, const EmailRecord& original,
                          const ValidationRules& rules) {
  ValidationReport report;
  const std::vector<std::string>& banned =
      rules.banned_tokens.empty() ? prompts::default_banned_tokens() : rules.banned_tokens;

  TokenizerConfig tokenizer;
  tokenizer.min_token_length = 1;
  const std::string combined = output.subject + "\n" + output.body;
  for (const auto& token : tokenize(combined, tokenizer)) {
    if (std::find(banned.begin(), banned.end(), token) == banned.end()) continue;
    if (std::find(report.failed_tokens.begin(), report.failed_tokens.end(), token) ==
        report.failed_tokens.end()) {
      report.failed_tokens.push_back(token);
    }
  }
  report.no_urgency_words = report.failed_tokens.empty();

  report.no_currency_amounts = !mentions_currency(combined);

  const auto names = greeting_tokens(original.receiver);
  if (names.empty()) {
    report.personalized_greeting = false;
  } else {
    std::string window = to_lower(output.body.substr(
        0, std::min(rules.greeting_window, output.body.size())));
    report.personalized_greeting =
        std::any_of(names.begin(), names.end(), [&](const std::string& name) {
          return window.find(name) != std::string::npos;
        });
  }

  report.nonempty_subject_and_body =
      !trim(output.subject).empty() && !trim(output.body).empty();
  return report;
}

RephraseResult rephrase_corpus(const Corpus& corpus, const PromptTemplate& tmpl,
                               const ProviderConfig& provider, ChatGateway& gateway,
                               std::size_t max_attempts, const ValidationRules& rules) {
  tmpl.validate();
  if (max_attempts == 0) {
    throw ConfigError("rephrase max_attempts must be at least 1");
  }

  RephraseResult result;
  result.corpus.set_name(corpus.name().empty()
                             ? std::string(prompt_condition_name(tmpl.kind))
                             : corpus.name() + "-" +
                                   std::string(prompt_condition_name(tmpl.kind)));
  const Provenance provenance = provenance_for(tmpl.kind);

  for (const auto& record : corpus.records()) {
    if (record.label == Label::Legitimate) {
      result.corpus.add(record);
      continue;
    }

    const RenderedPrompt base = render_prompt(tmpl, record);
    std::string user = base.user;
    std::vector<std::string> last_failed_rules;
    std::string last_reason;
    bool accepted = false;

    for (std::size_t attempt = 1; attempt <= max_attempts && !accepted; ++attempt) {
      ChatResponse response;
      try {
        response = gateway.complete(provider, ChatRequest{base.system, user, std::nullopt});
      } catch (const ProviderError& e) {
        last_reason = e.what();
        last_failed_rules.clear();
        break;
      }

      RephrasedOutput output;
      output.source_id = record.id;
      output.condition = tmpl.kind;
      try {
        std::tie(output.subject, output.body) = parse_rephrase_response(response.text);
      } catch (const ParseError& e) {
        last_reason = e.what();
        last_failed_rules = {"parseable_response"};
        user = base.user + corrective_suffix(last_failed_rules);
        continue;
      }

      output.validation = validate(output, record, rules);
      if (output.validation.pass()) {
        EmailRecord rephrased;
        rephrased.id = rephrased_id(record.id, provenance);
        rephrased.sender = record.sender;
        rephrased.receiver = record.receiver;
        rephrased.subject = output.subject;
        rephrased.body = output.body;
        rephrased.label = record.label;
        rephrased.provenance = provenance;
        result.corpus.add(std::move(rephrased));
        accepted = true;
      } else {
        last_failed_rules = output.validation.failed_rules();
        last_reason = "validation failed: " + join(last_failed_rules, ", ");
        user = base.user + corrective_suffix(last_failed_rules);
      }
    }

    if (!accepted) {
      RephraseFailure failure;
      failure.id = record.id;
      failure.reason = last_reason.empty()
                           ? "no acceptable rewrite after " + std::to_string(max_attempts) +
                                 " attempts"
                           : last_reason + " (after up to " + std::to_string(max_attempts) +
                                 " attempts)";
      failure.failed_rules = last_failed_rules;
      result.failures.push_back(std::move(failure));
    }
  }
  return result;
}

}  // namespace phishbench
