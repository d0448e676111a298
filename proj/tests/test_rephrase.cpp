#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "doctest.h"
#include "phishbench/corpus.hpp"
#include "phishbench/errors.hpp"
#include "phishbench/llmgate.hpp"
#include "phishbench/prompts.hpp"
#include "phishbench/rephrase.hpp"
#include "phishbench/util.hpp"
#include "support/fake_transport.hpp"
#include "support/temp_dir.hpp"

using namespace phishbench;
using testsupport::ScriptedTransport;
using testsupport::TempDir;

namespace {

const std::filesystem::path kPromptsDir = PHISHBENCH_PROMPTS_DIR;

EmailRecord phishing_record(std::string id, std::string receiver, std::string subject,
                            std::string body) {
  EmailRecord record;
  record.id = std::move(id);
  record.sender = "alerts@notices.example";
  record.receiver = std::move(receiver);
  record.subject = std::move(subject);
  record.body = std::move(body);
  record.label = Label::Phishing;
  return record;
}

Corpus two_phishing_one_legit() {
  Corpus corpus("mini");
  corpus.add(phishing_record("p-1", "jordan@client.example", "Urgent payment notice",
                             "Click the link and send your password today."));
  corpus.add(phishing_record("p-2", "casey@client.example", "Immediate transfer hold",
                             "Send the payment details to release the transfer."));
  EmailRecord legit;
  legit.id = "l-1";
  legit.sender = "team@corp.example";
  legit.receiver = "riley@corp.example";
  legit.subject = "Quarterly notes";
  legit.body = "Dear Riley,\n\nNotes from the review are attached.";
  corpus.add(legit);
  return corpus;
}

RephrasedOutput output_of(std::string subject, std::string body) {
  RephrasedOutput output;
  output.subject = std::move(subject);
  output.body = std::move(body);
  return output;
}

ChatGateway stub_gateway() {
  GatewayOptions options;
  options.sleep = [](double) {};
  return ChatGateway(std::make_shared<ScriptedTransport>(), options);
}

ProviderConfig stub_provider() {
  ProviderConfig config;
  config.name = "stub";
  return config;
}

ProviderConfig scripted_provider(std::size_t max_retries = 0) {
  ProviderConfig config;
  config.name = "scripted";
  config.endpoint = "https://scripted.example/v1";
  config.model_id = "scripted-model";
  config.max_retries = max_retries;
  return config;
}

}  // namespace

TEST_SUITE("rephrase") {

TEST_CASE("prompt conditions parse and name both ways") {
  CHECK(parse_prompt_condition("zero_shot") == PromptCondition::ZeroShot);
  CHECK(parse_prompt_condition("few_shot") == PromptCondition::FewShot);
  CHECK_THROWS_AS((void)parse_prompt_condition("one_shot"), ConfigError);
  CHECK(prompt_condition_name(PromptCondition::ZeroShot) == "zero_shot");
  CHECK(prompt_condition_name(PromptCondition::FewShot) == "few_shot");
  CHECK(provenance_for(PromptCondition::ZeroShot) == Provenance::ZeroShotRephrased);
  CHECK(provenance_for(PromptCondition::FewShot) == Provenance::FewShotRephrased);
}

TEST_CASE("prompt templates enforce their shot counts") {
  CHECK_NOTHROW(PromptTemplate::zero_shot().validate());
  CHECK_NOTHROW(PromptTemplate::few_shot().validate());

  PromptTemplate crossed = PromptTemplate::zero_shot();
  crossed.shots = prompts::default_shots();
  CHECK_THROWS_AS(crossed.validate(), ConfigError);

  PromptTemplate short_shots = PromptTemplate::few_shot();
  short_shots.shots.pop_back();
  CHECK_THROWS_WITH_AS(short_shots.validate(), doctest::Contains("exactly 3"),
                       ConfigError);

  PromptTemplate blank = PromptTemplate::zero_shot();
  blank.instruction.clear();
  CHECK_THROWS_AS(blank.validate(), ConfigError);
}

TEST_CASE("the shipped shot file round-trips the built-in examples") {
  const auto shots = load_shots(kPromptsDir / "few_shot_examples.jsonl");
  const auto& defaults = prompts::default_shots();
  REQUIRE(shots.size() == defaults.size());
  for (std::size_t i = 0; i < shots.size(); ++i) {
    CHECK(shots[i].original.sender == defaults[i].original.sender);
    CHECK(shots[i].original.receiver == defaults[i].original.receiver);
    CHECK(shots[i].original.subject == defaults[i].original.subject);
    CHECK(shots[i].original.body == defaults[i].original.body);
    CHECK(shots[i].rephrased_subject == defaults[i].rephrased_subject);
    CHECK(shots[i].rephrased_body == defaults[i].rephrased_body);
  }
}

TEST_CASE("shot files reject malformed lines") {
  TempDir tmp;
  write_text_file(tmp / "bad.jsonl", "{ not json\n");
  CHECK_THROWS_WITH_AS((void)load_shots(tmp / "bad.jsonl"), doctest::Contains("line 1"),
                       DataError);

  write_text_file(tmp / "missing.jsonl", R"({"original": {}, "subject": "x"})"
                                         "\n");
  CHECK_THROWS_WITH_AS((void)load_shots(tmp / "missing.jsonl"),
                       doctest::Contains("original, subject, body"), DataError);

  write_text_file(tmp / "empty.jsonl", "\n  \n");
  CHECK_THROWS_WITH_AS((void)load_shots(tmp / "empty.jsonl"),
                       doctest::Contains("no example pairs"), DataError);
}

TEST_CASE("rendered prompts lay out instruction, examples, and target in order") {
  const EmailRecord target = phishing_record(
      "t-1", "morgan@client.example", "Account check", "Click to confirm.");

  const RenderedPrompt zero = render_prompt(PromptTemplate::zero_shot(), target);
  CHECK(zero.system == prompts::kRephraseSystem);
  CHECK(zero.user.rfind(prompts::kRephraseInstruction, 0) == 0);
  CHECK(zero.user.find("ORIGINAL:") == std::string::npos);
  const std::size_t target_at = zero.user.find("EMAIL TO REPHRASE:\n");
  REQUIRE(target_at != std::string::npos);
  CHECK(zero.user.find("SUBJECT: Account check\n", target_at) != std::string::npos);
  CHECK(zero.user.find("RECEIVER: morgan@client.example\n", target_at) !=
        std::string::npos);
  // The format reminder closes the prompt.
  CHECK(zero.user.find("'Subject:' line followed by a 'Body:' section") >
        target_at);

  const RenderedPrompt few = render_prompt(PromptTemplate::few_shot(), target);
  std::size_t cursor = 0;
  for (const auto& shot : prompts::default_shots()) {
    const std::size_t original_at = few.user.find("ORIGINAL:\n", cursor);
    REQUIRE(original_at != std::string::npos);
    const std::size_t shot_subject_at =
        few.user.find("SUBJECT: " + shot.original.subject, original_at);
    REQUIRE(shot_subject_at != std::string::npos);
    const std::size_t rephrased_at = few.user.find("REPHRASED:\n", shot_subject_at);
    REQUIRE(rephrased_at != std::string::npos);
    CHECK(few.user.find("Subject: " + shot.rephrased_subject, rephrased_at) !=
          std::string::npos);
    cursor = rephrased_at;
  }
  // The target block comes after all three examples.
  CHECK(few.user.find("EMAIL TO REPHRASE:\n", cursor) != std::string::npos);
}

TEST_CASE("rephrase responses parse from plain and decorated forms") {
  const auto plain =
      parse_rephrase_response("Subject: Account news\nBody:\nline one\nline two");
  CHECK(plain.first == "Account news");
  CHECK(plain.second == "line one\nline two");

  const auto fenced = parse_rephrase_response(
      "Here is the rewrite:\n```\nSubject: Fenced\nBody:\ninside\n```\n");
  CHECK(fenced.first == "Fenced");
  CHECK(fenced.second == "inside");

  const auto inline_body =
      parse_rephrase_response("subject: lower\nBODY: starts here\nand continues");
  CHECK(inline_body.first == "lower");
  CHECK(inline_body.second == "starts here\nand continues");

  const auto padded =
      parse_rephrase_response("  Subject:   spaced out  \nBody:\ntext\n\n  \n");
  CHECK(padded.first == "spaced out");
  CHECK(padded.second == "text");
}

TEST_CASE("rephrase responses without markers raise parse errors with the raw text") {
  try {
    (void)parse_rephrase_response("I cannot help with that.");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("'Subject:'") != std::string::npos);
    CHECK(e.raw_text() == "I cannot help with that.");
  }

  try {
    (void)parse_rephrase_response("Subject: only a subject line");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("'Body:'") != std::string::npos);
  }
}

TEST_CASE("validation flags banned urgency tokens case-insensitively") {
  const EmailRecord original =
      phishing_record("p-1", "jordan@client.example", "x", "y");

  ValidationReport report =
      validate(output_of("URGENT reply needed", "Dear Jordan,\n\nHello."), original);
  CHECK_FALSE(report.no_urgency_words);
  CHECK(report.failed_tokens == std::vector<std::string>{"urgent"});
  CHECK_FALSE(report.pass());
  CHECK(report.failed_rules() == std::vector<std::string>{"no_urgency_words"});

  report = validate(
      output_of("Reply before the deadline", "Dear Jordan,\n\nDo it immediately."),
      original);
  CHECK(report.failed_tokens == std::vector<std::string>{"deadline", "immediately"});

  // Custom banned lists replace the defaults entirely.
  ValidationRules rules;
  rules.banned_tokens = {"hello"};
  report = validate(output_of("Urgent", "Dear Jordan,\n\nhello there."), original, rules);
  CHECK_FALSE(report.no_urgency_words);
  CHECK(report.failed_tokens == std::vector<std::string>{"hello"});
  report = validate(output_of("Urgent", "Dear Jordan,\n\nall fine."), original, rules);
  CHECK(report.no_urgency_words);
}

TEST_CASE("validation recognizes currency amounts in several shapes") {
  const EmailRecord original =
      phishing_record("p-1", "jordan@client.example", "x", "y");
  const auto currency_fails = [&](const std::string& body) {
    return !validate(output_of("Subject", "Dear Jordan,\n\n" + body), original)
                .no_currency_amounts;
  };

  CHECK(currency_fails("Send $5 now."));
  CHECK(currency_fails("Send $ 250 by reply."));
  CHECK(currency_fails("The fee is \xE2\x82\xAC" "10."));
  CHECK(currency_fails("A charge of \xC2\xA3" "3 applies."));
  CHECK(currency_fails("Wire 5 dollars to the account."));
  CHECK(currency_fails("The amount is usd 99."));
  CHECK(currency_fails("About 1 dollar remains."));
  CHECK_FALSE(currency_fails("It costs many dollars."));
  CHECK_FALSE(currency_fails("The $ sign alone is fine."));
  CHECK_FALSE(currency_fails("Version 3 is out."));
}

TEST_CASE("validation requires a greeting near the top of the body") {
  const EmailRecord original =
      phishing_record("p-1", "maria.santos@harborledger.com", "x", "y");

  CHECK(validate(output_of("S", "Dear Maria,\n\nhello."), original)
            .personalized_greeting);
  CHECK(validate(output_of("S", "Hello SANTOS, welcome back."), original)
            .personalized_greeting);

  // The name must fall inside the greeting window.
  const std::string padding(300, 'x');
  CHECK_FALSE(validate(output_of("S", padding + " Dear Maria,"), original)
                  .personalized_greeting);
  ValidationRules wide;
  wide.greeting_window = 400;
  CHECK(validate(output_of("S", padding + " Dear Maria,"), original, wide)
            .personalized_greeting);

  // Receivers with no name-like local part can never satisfy the rule.
  const EmailRecord unusable = phishing_record("p-2", "x9@client.example", "x", "y");
  CHECK_FALSE(
      validate(output_of("S", "Dear x9, hello."), unusable).personalized_greeting);
}

TEST_CASE("validation rejects blank subjects and bodies") {
  const EmailRecord original =
      phishing_record("p-1", "jordan@client.example", "x", "y");
  CHECK_FALSE(validate(output_of("   ", "Dear Jordan,\n\nfine."), original)
                  .nonempty_subject_and_body);
  CHECK_FALSE(validate(output_of("Subject", "  \n "), original)
                  .nonempty_subject_and_body);
  CHECK(validate(output_of("Subject", "Dear Jordan,\n\nfine."), original).pass());
}

TEST_CASE("the built-in worked example passes and its original fails as expected") {
  const auto& shot = prompts::default_shots().front();

  const ValidationReport good =
      validate(output_of(shot.rephrased_subject, shot.rephrased_body), shot.original);
  CHECK(good.pass());

  const ValidationReport bad =
      validate(output_of(shot.original.subject, shot.original.body), shot.original);
  CHECK(bad.failed_rules() == std::vector<std::string>{"no_urgency_words",
                                                       "personalized_greeting"});
  CHECK(bad.failed_tokens == std::vector<std::string>{"urgent"});
}

TEST_CASE("stub rephrasing transforms a corpus and logs no failures") {
  const Corpus corpus = two_phishing_one_legit();
  ChatGateway gateway = stub_gateway();

  const RephraseResult result = rephrase_corpus(corpus, PromptTemplate::zero_shot(),
                                                stub_provider(), gateway, 3);
  CHECK(result.failures.empty());
  CHECK(result.corpus.name() == "mini-zero_shot");
  REQUIRE(result.corpus.size() == 3);

  const EmailRecord* first = result.corpus.find("p-1::rz");
  REQUIRE(first != nullptr);
  CHECK(first->provenance == Provenance::ZeroShotRephrased);
  CHECK(first->label == Label::Phishing);
  CHECK(first->sender == "alerts@notices.example");
  CHECK(first->subject == "available confirmation notice");
  CHECK(first->body.rfind("Dear jordan,", 0) == 0);
  CHECK(lineage_root(first->id) == "p-1");

  // Legitimate records pass through byte-identical.
  const EmailRecord* untouched = result.corpus.find("l-1");
  REQUIRE(untouched != nullptr);
  CHECK(untouched->provenance == Provenance::Original);
  CHECK(untouched->body == corpus.find("l-1")->body);

  // Few-shot marks its provenance distinctly.
  ChatGateway gateway2 = stub_gateway();
  const RephraseResult few = rephrase_corpus(corpus, PromptTemplate::few_shot(),
                                             stub_provider(), gateway2, 3);
  CHECK(few.corpus.name() == "mini-few_shot");
  REQUIRE(few.corpus.find("p-1::rf") != nullptr);
  CHECK(few.corpus.find("p-1::rf")->provenance == Provenance::FewShotRephrased);
}

TEST_CASE("unparseable replies trigger a corrective re-prompt") {
  Corpus corpus("mini");
  corpus.add(phishing_record("p-1", "jordan@client.example", "Urgent check",
                             "Click and send your password."));

  auto transport = std::make_shared<ScriptedTransport>();
  transport->push_text("I am sorry, I cannot help with that request.");
  transport->push_text("Subject: Account check\nBody:\nDear Jordan,\n\nPlease review.");
  GatewayOptions options;
  options.sleep = [](double) {};
  ChatGateway gateway(transport, options);

  const RephraseResult result = rephrase_corpus(corpus, PromptTemplate::zero_shot(),
                                                scripted_provider(), gateway, 3);
  CHECK(result.failures.empty());
  REQUIRE(result.corpus.size() == 1);
  CHECK(result.corpus.records()[0].subject == "Account check");
  REQUIRE(transport->calls() == 2);
  CHECK(transport->requests[1].find("parseable_response") != std::string::npos);
  CHECK(transport->requests[1].find("failed these checks") != std::string::npos);
}

TEST_CASE("validation failures feed the failed rules back into the prompt") {
  Corpus corpus("mini");
  corpus.add(phishing_record("p-1", "jordan@client.example", "Urgent check",
                             "Click and send your password."));

  auto transport = std::make_shared<ScriptedTransport>();
  transport->push_text("Subject: Urgent news\nBody:\nNo greeting here.");
  transport->push_text("Subject: Account news\nBody:\nDear Jordan,\n\nPlease review.");
  GatewayOptions options;
  options.sleep = [](double) {};
  ChatGateway gateway(transport, options);

  const RephraseResult result = rephrase_corpus(corpus, PromptTemplate::zero_shot(),
                                                scripted_provider(), gateway, 3);
  CHECK(result.failures.empty());
  REQUIRE(transport->calls() == 2);
  CHECK(transport->requests[1].find("no_urgency_words, personalized_greeting") !=
        std::string::npos);
}

TEST_CASE("records that never validate are excluded and logged") {
  Corpus corpus("mini");
  corpus.add(phishing_record("p-1", "jordan@client.example", "Urgent check",
                             "Click and send your password."));

  auto transport = std::make_shared<ScriptedTransport>();
  for (int i = 0; i < 3; ++i) transport->push_text("No markers in this reply at all.");
  GatewayOptions options;
  options.sleep = [](double) {};
  ChatGateway gateway(transport, options);

  const RephraseResult result = rephrase_corpus(corpus, PromptTemplate::zero_shot(),
                                                scripted_provider(), gateway, 3);
  CHECK(result.corpus.empty());
  REQUIRE(result.failures.size() == 1);
  CHECK(result.failures[0].id == "p-1");
  CHECK(result.failures[0].failed_rules ==
        std::vector<std::string>{"parseable_response"});
  CHECK(result.failures[0].reason.find("(after up to 3 attempts)") !=
        std::string::npos);
  CHECK(transport->calls() == 3);
}

TEST_CASE("a provider failure skips the record but not the batch") {
  Corpus corpus("mini");
  corpus.add(phishing_record("p-1", "jordan@client.example", "Urgent check",
                             "Click and send your password."));
  corpus.add(phishing_record("p-2", "casey@client.example", "Immediate hold",
                             "Send the transfer details."));

  auto transport = std::make_shared<ScriptedTransport>();
  transport->push_reply(400, "rejected by upstream");
  transport->push_text("Subject: Account hold\nBody:\nDear Casey,\n\nPlease review.");
  GatewayOptions options;
  options.sleep = [](double) {};
  ChatGateway gateway(transport, options);

  const RephraseResult result = rephrase_corpus(corpus, PromptTemplate::zero_shot(),
                                                scripted_provider(), gateway, 3);
  REQUIRE(result.failures.size() == 1);
  CHECK(result.failures[0].id == "p-1");
  CHECK(result.failures[0].reason.find("HTTP 400") != std::string::npos);
  CHECK(result.failures[0].failed_rules.empty());
  REQUIRE(result.corpus.size() == 1);
  CHECK(result.corpus.records()[0].id == "p-2::rz");
}

TEST_CASE("rephrase batch configuration is validated up front") {
  const Corpus corpus = two_phishing_one_legit();
  ChatGateway gateway = stub_gateway();
  CHECK_THROWS_WITH_AS((void)rephrase_corpus(corpus, PromptTemplate::zero_shot(),
                                             stub_provider(), gateway, 0),
                       doctest::Contains("at least 1"), ConfigError);

  PromptTemplate broken = PromptTemplate::few_shot();
  broken.shots.clear();
  CHECK_THROWS_AS((void)rephrase_corpus(corpus, broken, stub_provider(), gateway, 3),
                  ConfigError);
}

}  // TEST_SUITE
