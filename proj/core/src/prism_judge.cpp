// Copyright 2026 The MIND Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mind/prism/judge.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <regex>
#include <set>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace mind::prism {

using nlohmann::json;

std::string_view rubric_prompt() {
  static constexpr std::string_view kPrompt =
      R"(You are a psychology expert grading a written analysis of one video clip of a person in conversation.
You are given the analysis and the clip's ground-truth annotation (macro-expression label, micro-expression label and the frames where the micro-expression occurs).

Score four dimensions independently:
1. mac  (0 to 1.5): does the analysis identify the ground-truth macro-expression, the sustained overt emotion of the clip?
2. mic  (0 to 1.25): does the analysis detect the ground-truth micro-expression and place it in time as a brief event?
3. pird (0 to 1.25): psychological insight and reasoning depth. Are inferences about inner state supported by the observed expressions, with explicit reasoning?
4. dcr  (0 to 1.0): detail coverage and richness. Does the analysis describe concrete facial regions and movements?

Do not award credit for labels that are not supported by the annotation. Stay within each range.
Reply with a single JSON object and nothing else:
{"scores": {"mac": <number>, "mic": <number>, "pird": <number>, "dcr": <number>}, "rationale": "<one paragraph>", "judge_id": "<model name>"})";
  return kPrompt;
}

// --- wire format -------------------------------------------------------------

namespace {

json annotation_json(const Annotation& a) {
  json segs = json::array();
  for (const auto& s : a.micro_segments) segs.push_back({{"t_start", s.t_start}, {"t_end", s.t_end}});
  json obj = {{"clip_id", a.clip_id},
              {"micro_segments", segs},
              {"micro_label", a.micro_label},
              {"macro_label", a.macro_label}};
  if (a.reference_analysis) obj["reference_analysis"] = *a.reference_analysis;
  return obj;
}

Annotation annotation_from_json(const json& obj) {
  Annotation a;
  a.clip_id = obj.at("clip_id").get<std::string>();
  for (const auto& s : obj.at("micro_segments"))
    a.micro_segments.push_back({s.at("t_start").get<std::size_t>(), s.at("t_end").get<std::size_t>()});
  a.micro_label = obj.at("micro_label").get<std::string>();
  a.macro_label = obj.at("macro_label").get<std::string>();
  if (obj.contains("reference_analysis") && obj["reference_analysis"].is_string())
    a.reference_analysis = obj["reference_analysis"].get<std::string>();
  return a;
}

json clamps_json(const std::vector<ClampEvent>& clamps) {
  json arr = json::array();
  for (const auto& c : clamps)
    arr.push_back({{"dimension", to_string(c.dimension)}, {"raw", c.raw}, {"clamped", c.clamped}});
  return arr;
}

}  // namespace

std::string encode_request(const JudgeRequest& req) {
  json body = {{"clip_id", req.clip_id},
               {"generated_analysis", req.generated_analysis},
               {"annotation", req.annotation ? annotation_json(*req.annotation) : json(nullptr)},
               {"rubric_version", req.rubric_version},
               {"prompt", rubric_prompt()}};
  return body.dump();
}

JudgeRequest decode_request(const std::string& body) {
  try {
    const json j = json::parse(body);
    JudgeRequest req;
    req.clip_id = j.at("clip_id").get<std::string>();
    req.generated_analysis = j.at("generated_analysis").get<std::string>();
    if (!j.at("annotation").is_null()) req.annotation = annotation_from_json(j["annotation"]);
    req.rubric_version = j.at("rubric_version").get<std::string>();
    return req;
  } catch (const json::exception& e) {
    throw Error(Errc::MalformedHeader, std::string("judge request: ") + e.what());
  }
}

std::string encode_response(const JudgeResponse& resp) {
  json scores = json::object();
  json clamped = json::object();
  for (Dimension d : kDimensions) {
    scores[std::string(to_string(d))] = resp.raw.get(d);
    clamped[std::string(to_string(d))] = resp.score.get(d);
  }
  json body = {{"scores", scores},
               {"ingested", clamped},
               {"clamps", clamps_json(resp.clamps)},
               {"rationale", resp.rationale},
               {"judge_id", resp.judge_id}};
  return body.dump();
}

JudgeResponse parse_reply(const std::string& body) {
  auto malformed = [&](const std::string& why) {
    return JudgeError(Errc::MalformedReply, why, body);
  };
  json j;
  try {
    j = json::parse(body);
  } catch (const json::exception&) {
    const auto open = body.find('{');
    const auto close = body.rfind('}');
    if (open == std::string::npos || close == std::string::npos || close < open)
      throw malformed("reply contains no JSON object");
    try {
      j = json::parse(body.substr(open, close - open + 1));
    } catch (const json::exception& e) {
      throw malformed(std::string("reply is not valid JSON: ") + e.what());
    }
  }
  if (!j.is_object() || !j.contains("scores") || !j["scores"].is_object())
    throw malformed("reply has no scores object");

  JudgeResponse resp;
  for (Dimension d : kDimensions) {
    const auto key = std::string(to_string(d));
    const json& s = j["scores"];
    if (!s.contains(key) || !s[key].is_number())
      throw malformed("score '" + key + "' missing or not numeric");
    resp.raw.set(d, s[key].get<double>());
  }
  if (j.contains("rationale") && j["rationale"].is_string()) resp.rationale = j["rationale"];
  if (j.contains("judge_id") && j["judge_id"].is_string()) resp.judge_id = j["judge_id"];
  try {
    resp.score = ingest(resp.raw, &resp.clamps);
  } catch (const Error& e) {
    throw malformed(e.what());
  }
  return resp;
}

// --- audit log ---------------------------------------------------------------

AuditLog::AuditLog(const std::filesystem::path& path)
    : path_(path), out_(path, std::ios::app | std::ios::binary) {
  if (!out_) throw Error(Errc::IoFailure, "cannot open audit log " + path.string());
}

void AuditLog::append(std::string_view json_record) {
  std::lock_guard lock(mutex_);
  out_ << json_record << '\n';
  out_.flush();
}

// --- mock judge --------------------------------------------------------------

const MockLexicon& mock_lexicon() {
  static const MockLexicon lex{
      {"briefly", "brief", "fleeting", "fleetingly", "momentarily", "for a moment", "for an instant",
       "split second", "flash", "flashes", "quickly", "suddenly", "transient"},
      {"because", "therefore", "thus", "hence", "since", "suggests", "suggesting", "indicates",
       "indicating", "implies", "reflects", "reveals", "due to", "as a result", "which means",
       "consequently"},
      {{"brow", {"brow", "brows", "eyebrow", "eyebrows"}},
       {"eye", {"eye", "eyes", "eyelid", "eyelids", "gaze"}},
       {"mouth", {"mouth", "lip", "lips"}},
       {"jaw", {"jaw"}},
       {"cheek", {"cheek", "cheeks"}},
       {"nose", {"nose", "nostril", "nostrils"}},
       {"forehead", {"forehead"}},
       {"chin", {"chin"}},
       {"head", {"head"}}},
  };
  return lex;
}

namespace {

using Tokens = std::vector<std::string>;

Tokens tokenize(std::string_view text) {
  Tokens out;
  std::string cur;
  for (char ch : text) {
    const auto u = static_cast<unsigned char>(ch);
    if (std::isalnum(u)) {
      cur.push_back(static_cast<char>(std::tolower(u)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

// Non-overlapping occurrences of a token phrase.
std::size_t count_phrase(const Tokens& text, const Tokens& phrase) {
  if (phrase.empty() || phrase.size() > text.size()) return 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i + phrase.size() <= text.size();) {
    if (std::equal(phrase.begin(), phrase.end(), text.begin() + static_cast<std::ptrdiff_t>(i))) {
      ++n;
      i += phrase.size();
    } else {
      ++i;
    }
  }
  return n;
}

struct LabelCredit {
  double credit = 0.0;
  std::size_t matched = 0;
  std::size_t total = 0;
};

LabelCredit label_credit(const Tokens& text, std::string_view label) {
  const Tokens label_tokens = tokenize(label);
  const std::set<std::string> distinct(label_tokens.begin(), label_tokens.end());
  LabelCredit lc;
  lc.total = distinct.size();
  if (distinct.empty()) return lc;
  if (count_phrase(text, label_tokens) > 0) {
    lc.matched = lc.total;
    lc.credit = 1.0;
    return lc;
  }
  const std::set<std::string> present(text.begin(), text.end());
  for (const auto& t : distinct) lc.matched += present.count(t);
  lc.credit = static_cast<double>(lc.matched) / static_cast<double>(lc.total);
  return lc;
}

std::string fmt3(double v) { return format_score(v); }

}  // namespace

JudgeResponse judge_mock(const JudgeRequest& req) {
  if (!req.annotation) throw Error(Errc::MissingAnnotation, "clip " + req.clip_id + " has no annotation");
  const MockLexicon& lex = mock_lexicon();
  const Tokens text = tokenize(req.generated_analysis);

  const LabelCredit macro = label_credit(text, req.annotation->macro_label);
  const LabelCredit micro = label_credit(text, req.annotation->micro_label);

  bool temporal = false;
  for (const auto& p : lex.temporal) temporal = temporal || count_phrase(text, tokenize(p)) > 0;

  std::size_t causal = 0;
  for (const auto& p : lex.causal) causal += count_phrase(text, tokenize(p));

  std::size_t regions = 0;
  for (const auto& [name, words] : lex.regions) {
    bool hit = false;
    for (const auto& w : words) hit = hit || count_phrase(text, tokenize(w)) > 0;
    regions += hit ? 1 : 0;
  }

  JudgeResponse resp;
  resp.raw.mac = kMacCap * macro.credit;
  resp.raw.mic = temporal ? kMicCap * micro.credit : 0.0;
  resp.raw.pird = std::min(kPirdCap, 0.25 * static_cast<double>(causal));
  resp.raw.dcr = std::min(kDcrCap, 0.2 * static_cast<double>(regions));
  resp.judge_id = "mock:" + std::string(kMockRulesVersion);
  resp.rationale = "mac " + fmt3(resp.raw.mac) + " (macro label tokens " +
                   std::to_string(macro.matched) + "/" + std::to_string(macro.total) + "); mic " +
                   fmt3(resp.raw.mic) + " (micro label tokens " + std::to_string(micro.matched) + "/" +
                   std::to_string(micro.total) + ", temporal phrase " + (temporal ? "yes" : "no") +
                   "); pird " + fmt3(resp.raw.pird) + " (" + std::to_string(causal) +
                   " causal connectives); dcr " + fmt3(resp.raw.dcr) + " (" + std::to_string(regions) +
                   " facial regions)";
  resp.score = ingest(resp.raw, &resp.clamps);
  return resp;
}

// --- remote judge ------------------------------------------------------------

std::chrono::milliseconds backoff_delay(const RemoteJudgeConfig& cfg, int attempt) {
  double ms = static_cast<double>(cfg.backoff_initial.count()) *
              std::pow(cfg.backoff_factor, std::max(0, attempt - 1));
  ms = std::min(ms, static_cast<double>(cfg.backoff_max.count()));
  return std::chrono::milliseconds(static_cast<long long>(ms));
}

namespace {

struct Endpoint {
  std::string base;  // scheme://host:port
  std::string path;
};

Endpoint parse_endpoint(const std::string& url) {
  static const std::regex re(R"(^(https?)://([^/:]+)(:(\d+))?(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, re)) throw Error(Errc::ConfigError, "bad judge endpoint '" + url + "'");
  Endpoint e;
  e.base = m[1].str() + "://" + m[2].str() + (m[4].matched ? ":" + m[4].str() : "");
  e.path = m[5].matched ? m[5].str() : "/";
  return e;
}

void audit_attempt(AuditLog* audit, const JudgeRequest& req, const std::string& body, int attempt,
                   int status, const std::string& reply, std::string_view outcome) {
  if (!audit) return;
  json rec = {{"event", "attempt"},  {"clip_id", req.clip_id}, {"attempt", attempt},
              {"request", body},     {"http_status", status},  {"raw_reply", reply},
              {"outcome", outcome}};
  audit->append(rec.dump());
}

}  // namespace

JudgeResponse judge_remote(const JudgeRequest& req, const RemoteJudgeConfig& cfg, AuditLog* audit) {
  if (req.generated_analysis.empty())
    throw JudgeError(Errc::MalformedReply, "refusing to judge an empty analysis");
  const char* key = std::getenv(cfg.api_key_env.c_str());
  if (key == nullptr || *key == '\0')
    throw JudgeError(Errc::AuthFailure, "environment variable " + cfg.api_key_env + " is not set", {}, 0);

  const Endpoint ep = parse_endpoint(cfg.endpoint);
  httplib::Client client(ep.base);
  client.set_connection_timeout(cfg.timeout);
  client.set_read_timeout(cfg.timeout);
  client.set_write_timeout(cfg.timeout);
  const httplib::Headers headers = {{"Authorization", std::string("Bearer ") + key}};
  const std::string body = encode_request(req);

  const int attempts = std::max(1, cfg.max_attempts);
  Errc last_code = Errc::TransportFailure;
  std::string last_message;
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    if (attempt > 1) std::this_thread::sleep_for(backoff_delay(cfg, attempt - 1));

    auto res = client.Post(ep.path, headers, body, "application/json");
    if (!res) {
      const auto err = res.error();
      last_code = (err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout ||
                   err == httplib::Error::Write)
                      ? Errc::Timeout
                      : Errc::TransportFailure;
      last_message = "request failed: " + httplib::to_string(err);
      audit_attempt(audit, req, body, attempt, 0, {}, to_string(last_code));
      continue;
    }
    const int status = res->status;
    if (status == 401 || status == 403) {
      audit_attempt(audit, req, body, attempt, status, res->body, "AuthFailure");
      throw JudgeError(Errc::AuthFailure, "judge rejected credentials (HTTP " + std::to_string(status) + ")",
                       res->body, attempt);
    }
    if (status == 429 || status >= 500) {
      last_code = Errc::TransportFailure;
      last_message = "judge returned HTTP " + std::to_string(status);
      audit_attempt(audit, req, body, attempt, status, res->body, "retry");
      continue;
    }
    if (status != 200) {
      audit_attempt(audit, req, body, attempt, status, res->body, "TransportFailure");
      throw JudgeError(Errc::TransportFailure, "judge returned HTTP " + std::to_string(status),
                       res->body, attempt);
    }
    try {
      JudgeResponse resp = parse_reply(res->body);
      audit_attempt(audit, req, body, attempt, status, res->body, "ok");
      for (const auto& c : resp.clamps) {
        std::fprintf(stderr, "judge: clip %s %s clamped %g -> %g\n", req.clip_id.c_str(),
                     std::string(to_string(c.dimension)).c_str(), c.raw, c.clamped);
        if (audit) {
          json rec = {{"event", "clamp"}, {"clip_id", req.clip_id}, {"dimension", to_string(c.dimension)},
                      {"raw", c.raw}, {"clamped", c.clamped}};
          audit->append(rec.dump());
        }
      }
      return resp;
    } catch (const JudgeError&) {
      audit_attempt(audit, req, body, attempt, status, res->body, "MalformedReply");
      throw;
    }
  }
  throw JudgeError(last_code, last_message + " after " + std::to_string(attempts) + " attempts", {},
                   attempts);
}

}  // namespace mind::prism
