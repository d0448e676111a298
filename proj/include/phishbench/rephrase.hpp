#pragma once

#include <string>
#include <utility>
#include <vector>

#include "phishbench/corpus.hpp"
#include "phishbench/llmgate.hpp"
#include "phishbench/prompts.hpp"

namespace phishbench {

enum class PromptCondition { ZeroShot, FewShot };

PromptCondition parse_prompt_condition(std::string_view text);
std::string_view prompt_condition_name(PromptCondition condition);
Provenance provenance_for(PromptCondition condition);

/// Instruction plus worked examples: zero-shot carries no shots, few-shot
/// carries exactly three.
struct PromptTemplate {
  PromptCondition kind = PromptCondition::ZeroShot;
  std::string instruction;
  std::vector<prompts::ShotPair> shots;

  static PromptTemplate zero_shot();
  static PromptTemplate few_shot();
  static PromptTemplate few_shot(std::vector<prompts::ShotPair> shots);

  /// Throws ConfigError when the shot count does not match the kind.
  void validate() const;
};

/// Shot pairs stored as JSONL: one object per line with keys
/// {original: {sender, receiver, subject, body}, subject, body}.
std::vector<prompts::ShotPair> load_shots(const std::filesystem::path& path);

struct RenderedPrompt {
  std::string system;
  std::string user;
};

/// Deterministic rendering: instruction verbatim, then the worked examples
/// as ORIGINAL:/REPHRASED: blocks (few-shot only), then the target email as
/// SUBJECT/BODY/SENDER/RECEIVER labeled fields.
RenderedPrompt render_prompt(const PromptTemplate& tmpl, const EmailRecord& email);

/// Extracts the first "Subject:" line and the text following the first
/// "Body:" marker, tolerating surrounding prose and markdown fences.
/// Throws ParseError (carrying the raw text) when either marker is missing.
std::pair<std::string, std::string> parse_rephrase_response(const std::string& text);

struct ValidationRules {
  std::vector<std::string> banned_tokens;   // empty = module defaults
  std::size_t greeting_window = 200;
};

struct ValidationReport {
  bool no_urgency_words = false;
  bool no_currency_amounts = false;
  bool personalized_greeting = false;
  bool nonempty_subject_and_body = false;
  std::vector<std::string> failed_tokens;

  bool pass() const {
    return no_urgency_words && no_currency_amounts && personalized_greeting &&
           nonempty_subject_and_body;
  }
  std::vector<std::string> failed_rules() const;
};

struct RephrasedOutput {
  std::string subject;
  std::string body;
  std::string source_id;
  PromptCondition condition = PromptCondition::ZeroShot;
  ValidationReport validation;
};

/// Checks a rephrased subject/body against the prompt's own constraints:
/// no banned urgency tokens (case-insensitive, subject or body), no currency
/// amounts in the body, a personalized greeting derived from the original
/// receiver's local part within the first greeting_window characters, and
/// non-empty subject and body after trimming.
ValidationReport validate(const RephrasedOutput& output, const EmailRecord& original,
                          const ValidationRules& rules = {});

struct RephraseFailure {
  std::string id;
  std::string reason;
  std::vector<std::string> failed_rules;
};

struct RephraseResult {
  Corpus corpus;
  std::vector<RephraseFailure> failures;
};

/// For each phishing record: render, complete, parse, validate; on failure
/// re-prompt up to max_attempts with the failed rules appended as
/// corrective instructions; records still failing are excluded and logged.
/// Legitimate records pass through untouched. Gateway errors land in the
/// failure log without aborting the batch.
RephraseResult rephrase_corpus(const Corpus& corpus, const PromptTemplate& tmpl,
                               const ProviderConfig& provider, ChatGateway& gateway,
                               std::size_t max_attempts = 3,
                               const ValidationRules& rules = {});

}  // namespace phishbench
