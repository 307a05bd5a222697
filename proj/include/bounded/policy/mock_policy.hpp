#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "bounded/policy/policy.hpp"

namespace bounded::policy {

struct MockRule {
  // Case-insensitive substrings; any one matches.
  std::vector<std::string> keywords;
  std::string talk_name;
  std::optional<std::string> nontalk_name;
  // Templates with {actor} and {target} placeholders. Regeneration attempts
  // walk the list.
  std::vector<std::string> dialogue;
};

struct MockRuleTable {
  std::vector<MockRule> rules;
  // Used when no rule matches.
  MockRule fallback{{}, "ask for their opinion", std::nullopt, {"What do you think, {target}?"}};
  // Intents for self-directed heartbeat actions.
  std::vector<std::string> idle_intents;
};

// Line types: {"type":"rule",...}, {"type":"default",...}, {"type":"idle","intent":...}.
MockRuleTable parse_rule_table(std::istream& in);
MockRuleTable load_rule_table(const std::filesystem::path& path);

// Deterministic keyword-rule stand-in for a language model.
class MockPolicy final : public PolicyBackend {
 public:
  explicit MockPolicy(MockRuleTable table) : table_(std::move(table)) {}

  PolicyProposal propose(const PolicyContext& context) override;
  std::string generate_dialogue(const PolicyContext& context, const DialoguePair& pair,
                                int attempt) override;
  std::string id() const override { return "mock"; }

  // First rule whose keyword occurs in `text`, or the fallback rule.
  const MockRule& match(std::string_view text) const;

 private:
  MockRuleTable table_;
};

// Fills {actor} and {target} placeholders.
std::string fill_template(std::string_view tmpl, std::string_view actor, std::string_view target);

}  // namespace bounded::policy
