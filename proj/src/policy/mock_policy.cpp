#include "bounded/policy/mock_policy.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>

#include "bounded/core/errors.hpp"
#include "bounded/core/rng.hpp"

namespace bounded::policy {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

MockRule rule_from_json(const Json& j) {
  MockRule r;
  if (j.contains("keywords")) {
    for (const auto& k : j.at("keywords")) r.keywords.push_back(lower(k.get<std::string>()));
  }
  r.talk_name = j.at("talk_name").get<std::string>();
  if (j.contains("nontalk_name") && !j.at("nontalk_name").is_null()) {
    r.nontalk_name = j.at("nontalk_name").get<std::string>();
  }
  if (j.contains("dialogue")) {
    const auto& d = j.at("dialogue");
    if (d.is_string()) {
      r.dialogue.push_back(d.get<std::string>());
    } else {
      for (const auto& t : d) r.dialogue.push_back(t.get<std::string>());
    }
  }
  return r;
}

}  // namespace

MockRuleTable parse_rule_table(std::istream& in) {
  MockRuleTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = Json::parse(line);
      const auto type = j.value("type", std::string("rule"));
      if (type == "rule") {
        table.rules.push_back(rule_from_json(j));
      } else if (type == "default") {
        table.fallback = rule_from_json(j);
      } else if (type == "idle") {
        table.idle_intents.push_back(j.at("intent").get<std::string>());
      } else {
        throw Error(Errc::parse, "unknown rule line type '" + type + "'", line_no);
      }
    } catch (const Json::exception& e) {
      throw Error(Errc::parse, e.what(), line_no);
    }
  }
  return table;
}

MockRuleTable load_rule_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, "cannot open rule table '" + path.string() + "'");
  return parse_rule_table(in);
}

std::string fill_template(std::string_view tmpl, std::string_view actor, std::string_view target) {
  std::string out;
  out.reserve(tmpl.size() + 16);
  for (std::size_t i = 0; i < tmpl.size();) {
    if (tmpl.compare(i, 7, "{actor}") == 0) {
      out += actor;
      i += 7;
    } else if (tmpl.compare(i, 8, "{target}") == 0) {
      out += target;
      i += 8;
    } else {
      out += tmpl[i++];
    }
  }
  return out;
}

const MockRule& MockPolicy::match(std::string_view text) const {
  const std::string haystack = lower(text);
  for (const auto& rule : table_.rules) {
    for (const auto& k : rule.keywords) {
      if (!k.empty() && haystack.find(k) != std::string::npos) return rule;
    }
  }
  return table_.fallback;
}

PolicyProposal MockPolicy::propose(const PolicyContext& context) {
  PolicyProposal p;
  if (context.self_directed) {
    if (table_.idle_intents.empty()) {
      p.self_intent = "stand idle";
    } else {
      // Pick by a hash of (agent, time) so the choice is a pure function of
      // the context.
      std::uint64_t key = static_cast<std::uint64_t>(context.now);
      for (unsigned char c : context.acting_agent) key = key * 131 + c;
      const auto n = table_.idle_intents.size();
      p.self_intent = table_.idle_intents[Rng::splitmix64(key) % n];
    }
    p.talk_name = *p.self_intent;
    p.rationale = "idle heartbeat";
    return p;
  }
  const MockRule& rule = match(context.stimulus.text);
  p.talk_name = rule.talk_name;
  p.nontalk_name = rule.nontalk_name;
  p.rationale = rule.keywords.empty() ? "no rule matched" : "rule: " + rule.keywords.front();
  return p;
}

std::string MockPolicy::generate_dialogue(const PolicyContext& context, const DialoguePair& /*pair*/,
                                          int attempt) {
  const MockRule& rule = match(context.stimulus.text);
  const auto& templates = rule.dialogue.empty() ? table_.fallback.dialogue : rule.dialogue;
  const std::string actor = context.display_name(context.acting_agent);
  const std::string target = context.target ? context.display_name(*context.target) : std::string("everyone");
  if (templates.empty()) return fill_template("...", actor, target);
  const auto i = static_cast<std::size_t>(std::max(attempt, 0)) % templates.size();
  return fill_template(templates[i], actor, target);
}

}  // namespace bounded::policy
