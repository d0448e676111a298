#pragma once

#include <map>
#include <string>
#include <vector>

#include "phishbench/corpus.hpp"

namespace phishbench::prompts {

/// Rewrite instruction used by both prompt conditions; the few-shot
/// condition adds the three worked example pairs after it.
extern const char* const kRephraseInstruction;

/// Classification directive for LLM-as-detector runs. Responses are parsed
/// by their first word.
extern const char* const kClassifyDirective;

/// Directive for synthesizing new phishing training emails.
extern const char* const kGenerateDirective;

extern const char* const kRephraseSystem;
extern const char* const kClassifySystem;
extern const char* const kGenerateSystem;

/// One worked example: an original phishing email and the desired rewrite.
struct ShotPair {
  EmailRecord original;
  std::string rephrased_subject;
  std::string rephrased_body;
};

/// The three default few-shot examples. The first pair is the published
/// reference example; the other two are toolkit-authored.
const std::vector<ShotPair>& default_shots();

/// Word list that makes the offline stub flag an email as phishing.
const std::vector<std::string>& suspicious_tokens();

/// Neutral replacements the offline stub applies when rephrasing.
const std::map<std::string, std::string>& neutral_synonyms();

/// Default banned tokens for the urgency validation rule.
const std::vector<std::string>& default_banned_tokens();

/// Labeled-field rendering of an email used inside prompts:
/// SUBJECT / BODY / SENDER / RECEIVER lines.
std::string render_email_fields(const EmailRecord& record);

}  // namespace phishbench::prompts
