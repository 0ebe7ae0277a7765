// Copyright 2026 The MIND Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mind/error.hpp"
#include "mind/feature_streams.hpp"
#include "mind/prism/score.hpp"

namespace mind::prism {

inline constexpr std::string_view kRubricVersion = "prism-rubric-v1";
inline constexpr std::string_view kMockRulesVersion = "prism-mock-v1";

// Rubric prompt sent to remote judges for kRubricVersion.
std::string_view rubric_prompt();

struct JudgeRequest {
  std::string clip_id;
  std::string generated_analysis;
  std::optional<Annotation> annotation;
  std::string rubric_version = std::string(kRubricVersion);
};

struct JudgeResponse {
  RawScores raw;
  std::string rationale;
  std::string judge_id;
  PrismScore score;                 // raw after clamping
  std::vector<ClampEvent> clamps;   // one entry per clamped dimension
};

// Judge failure. MalformedReply keeps the body that failed to parse.
class JudgeError : public Error {
 public:
  JudgeError(Errc code, const std::string& message, std::string raw_reply = {}, int attempts = 1)
      : Error(code, message), raw_reply_(std::move(raw_reply)), attempts_(attempts) {}

  const std::string& raw_reply() const noexcept { return raw_reply_; }
  int attempts() const noexcept { return attempts_; }

 private:
  std::string raw_reply_;
  int attempts_;
};

// --- wire format -------------------------------------------------------------
//
// Request body:  {"clip_id", "generated_analysis", "annotation": {...}|null,
//                 "rubric_version", "prompt"}
// Reply body:    {"scores": {"mac","mic","pird","dcr"}, "rationale", "judge_id"}
// A reply may wrap the JSON object in other text; the outermost {...} is parsed.

std::string encode_request(const JudgeRequest& req);
JudgeRequest decode_request(const std::string& body);

std::string encode_response(const JudgeResponse& resp);
// Parses and ingests a reply. Throws JudgeError(MalformedReply) with the raw body.
JudgeResponse parse_reply(const std::string& body);

// --- audit log ---------------------------------------------------------------

// Append-only JSON-lines file; one record per call. Thread-safe.
class AuditLog {
 public:
  explicit AuditLog(const std::filesystem::path& path);

  void append(std::string_view json_record);
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
  std::mutex mutex_;
  std::ofstream out_;
};

// --- mock judge --------------------------------------------------------------
//
// Rules (version prism-mock-v1). Text is lower-cased and split into
// alphanumeric tokens; phrases match as contiguous token runs.
//   mac  = 1.5  × label credit of the macro label
//   mic  = 1.25 × label credit of the micro label, only if a temporal phrase
//          (lexicon below) occurs; otherwise 0
//   pird = min(1.25, 0.25 × occurrences of causal connectives)
//   dcr  = min(1.0,  0.2  × distinct facial regions mentioned)
// Label credit is 1 when the whole label occurs as a phrase, otherwise the
// fraction of distinct label tokens found anywhere in the text.

struct MockLexicon {
  std::vector<std::string> temporal;
  std::vector<std::string> causal;
  // region name -> words that count as that region
  std::vector<std::pair<std::string, std::vector<std::string>>> regions;
};

const MockLexicon& mock_lexicon();

// Throws MissingAnnotation when the request has no annotation.
JudgeResponse judge_mock(const JudgeRequest& req);

// --- remote judge ------------------------------------------------------------

struct RemoteJudgeConfig {
  std::string endpoint;  // http://host[:port]/path
  std::string api_key_env = "MIND_JUDGE_API_KEY";
  std::chrono::milliseconds timeout{30000};
  int max_attempts = 3;
  std::chrono::milliseconds backoff_initial{200};
  double backoff_factor = 2.0;
  std::chrono::milliseconds backoff_max{5000};
};

// Backoff before retry number `attempt` (1-based), capped at backoff_max.
std::chrono::milliseconds backoff_delay(const RemoteJudgeConfig& cfg, int attempt);

// POSTs the request with a bearer token read from cfg.api_key_env.
// Transport failures, timeouts, HTTP 429 and 5xx are retried up to
// max_attempts. Throws JudgeError with code Timeout, AuthFailure,
// TransportFailure or MalformedReply. Every attempt and clamp is written to
// the audit log when one is given.
JudgeResponse judge_remote(const JudgeRequest& req, const RemoteJudgeConfig& cfg,
                           AuditLog* audit = nullptr);

using JudgeFn = std::function<JudgeResponse(const JudgeRequest&)>;

}  // namespace mind::prism
