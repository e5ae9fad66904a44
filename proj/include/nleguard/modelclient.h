//
// Copyright 2026 The nleguard Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef NLEGUARD_MODELCLIENT_H_
#define NLEGUARD_MODELCLIENT_H_

#include <chrono>
#include <memory>
#include <string>
#include <string_view>

#include "absl/container/flat_hash_map.h"
#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace nleguard {

struct Prediction {
  std::string label;
  std::string nle;

  friend bool operator==(const Prediction&, const Prediction&) = default;
};

// The explaining model m (Predict) and the reverse explainer (Reverse).
// Implementations must tolerate concurrent calls.
//
// Error contract: transport failures are kUnavailable, malformed or non-200
// responses are kInternal ("protocol"), bad arguments kInvalidArgument.
class ModelClient {
 public:
  virtual ~ModelClient() = default;

  virtual absl::StatusOr<Prediction> Predict(std::string_view context,
                                             std::string_view variable) const = 0;

  // Generates a variable part for which the model would explain with `nle`.
  virtual absl::StatusOr<std::string> Reverse(std::string_view context,
                                              std::string_view nle) const = 0;

  virtual bool Healthy() const = 0;
};

// Request/response bodies of the /v1 protocol:
//   POST /v1/predict {"context", "variable"} -> {"label", "nle"}
//   POST /v1/reverse {"context", "nle"}      -> {"variable"}
//   GET  /v1/health                          -> {"status": "ok"}
// Non-200 responses carry {"error"}.
namespace wire {

inline constexpr std::string_view kPredictPath = "/v1/predict";
inline constexpr std::string_view kReversePath = "/v1/reverse";
inline constexpr std::string_view kHealthPath = "/v1/health";

absl::StatusOr<std::string> EncodePredictRequest(std::string_view context,
                                                 std::string_view variable);
absl::StatusOr<std::string> EncodeReverseRequest(std::string_view context,
                                                 std::string_view nle);
absl::StatusOr<Prediction> DecodePredictResponse(std::string_view body);
absl::StatusOr<std::string> DecodeReverseResponse(std::string_view body);
bool DecodeHealthResponse(std::string_view body);
// Best-effort "error" field of a failure body; the raw body otherwise.
std::string DecodeErrorMessage(std::string_view body);

}  // namespace wire

struct HttpClientOptions {
  std::chrono::milliseconds timeout{10000};
  // Attempts after the first one, for transport errors and 5xx responses.
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{200};
};

// Client for a server speaking the /v1 protocol. Requests are assumed
// idempotent: failed calls are retried with exponential backoff.
class HttpModelClient : public ModelClient {
 public:
  // `url` is "http://host:port" optionally followed by a path prefix.
  static absl::StatusOr<std::unique_ptr<HttpModelClient>> Create(
      std::string_view url, HttpClientOptions options = {});

  absl::StatusOr<Prediction> Predict(std::string_view context,
                                     std::string_view variable) const override;
  absl::StatusOr<std::string> Reverse(std::string_view context,
                                      std::string_view nle) const override;
  bool Healthy() const override;

  const std::string& base_url() const { return base_url_; }

 private:
  HttpModelClient(std::string base_url, std::string prefix,
                  HttpClientOptions options)
      : base_url_(std::move(base_url)),
        prefix_(std::move(prefix)),
        options_(options) {}

  absl::StatusOr<std::string> Post(std::string_view path,
                                   const std::string& body) const;

  std::string base_url_;
  std::string prefix_;
  HttpClientOptions options_;
};

// What the mock answers for inputs missing from its fixture.
enum class MockFallback {
  kEcho,        // predict -> (fixed_label, variable); reverse -> nle
  kFixedLabel,  // predict -> (fixed_label, ""); reverse -> nle
  kError,       // kNotFound
};

struct MockOptions {
  MockFallback fallback = MockFallback::kEcho;
  std::string fixed_label = "neutral";
};

// Deterministic in-process model backed by a JSONL fixture:
//   {"op": "predict", "context", "variable", "out": {"label", "nle"}}
//   {"op": "reverse", "context", "nle", "out": {"variable"}}
// Lookups match on the normalized (context, input) pair.
class MockModelClient : public ModelClient {
 public:
  explicit MockModelClient(MockOptions options = {}) : options_(std::move(options)) {}

  static absl::StatusOr<MockModelClient> FromFixtureText(std::string_view jsonl,
                                                         MockOptions options = {});
  static absl::StatusOr<MockModelClient> FromFixtureFile(const std::string& path,
                                                         MockOptions options = {});

  void AddPrediction(std::string_view context, std::string_view variable,
                     Prediction out);
  void AddReverse(std::string_view context, std::string_view nle,
                  std::string variable);

  absl::StatusOr<Prediction> Predict(std::string_view context,
                                     std::string_view variable) const override;
  absl::StatusOr<std::string> Reverse(std::string_view context,
                                      std::string_view nle) const override;
  bool Healthy() const override { return true; }

 private:
  MockOptions options_;
  absl::flat_hash_map<std::string, Prediction> predictions_;
  absl::flat_hash_map<std::string, std::string> reversals_;
};

// "mock:<fixture.jsonl>", "mock" (empty fixture) or an http:// URL.
absl::StatusOr<std::unique_ptr<ModelClient>> MakeModelClient(
    std::string_view endpoint, HttpClientOptions http_options = {},
    MockOptions mock_options = {});

}  // namespace nleguard

#endif  // NLEGUARD_MODELCLIENT_H_
