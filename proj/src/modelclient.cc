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

#include "nleguard/modelclient.h"

#include <fstream>
#include <thread>

#include "absl/strings/match.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "httplib.h"
#include "json.hpp"
#include "nleguard/text.h"

namespace nleguard {
namespace {

using nlohmann::json;

constexpr char kKeySeparator = '\x1f';

std::string MockKey(std::string_view context, std::string_view input) {
  std::string key = Normalize(context);
  key.push_back(kKeySeparator);
  key += Normalize(input);
  return key;
}

absl::StatusOr<std::string> Dump(const json& j) {
  try {
    return j.dump();
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("cannot encode request: ", e.what()));
  }
}

absl::StatusOr<json> ParseObject(std::string_view body) {
  json j = json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) {
    return absl::InternalError("protocol error: response is not a JSON object");
  }
  return j;
}

absl::StatusOr<std::string> StringField(const json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end() || !it->is_string()) {
    return absl::InternalError(
        absl::StrCat("protocol error: missing string field \"", name, "\""));
  }
  return it->get<std::string>();
}

}  // namespace

namespace wire {

absl::StatusOr<std::string> EncodePredictRequest(std::string_view context,
                                                 std::string_view variable) {
  return Dump(json{{"context", context}, {"variable", variable}});
}

absl::StatusOr<std::string> EncodeReverseRequest(std::string_view context,
                                                 std::string_view nle) {
  return Dump(json{{"context", context}, {"nle", nle}});
}

absl::StatusOr<Prediction> DecodePredictResponse(std::string_view body) {
  absl::StatusOr<json> j = ParseObject(body);
  if (!j.ok()) return j.status();
  absl::StatusOr<std::string> label = StringField(*j, "label");
  if (!label.ok()) return label.status();
  absl::StatusOr<std::string> nle = StringField(*j, "nle");
  if (!nle.ok()) return nle.status();
  return Prediction{*std::move(label), *std::move(nle)};
}

absl::StatusOr<std::string> DecodeReverseResponse(std::string_view body) {
  absl::StatusOr<json> j = ParseObject(body);
  if (!j.ok()) return j.status();
  return StringField(*j, "variable");
}

bool DecodeHealthResponse(std::string_view body) {
  absl::StatusOr<json> j = ParseObject(body);
  if (!j.ok()) return false;
  absl::StatusOr<std::string> status = StringField(*j, "status");
  return status.ok() && *status == "ok";
}

std::string DecodeErrorMessage(std::string_view body) {
  absl::StatusOr<json> j = ParseObject(body);
  if (j.ok()) {
    if (absl::StatusOr<std::string> e = StringField(*j, "error"); e.ok()) return *e;
  }
  return std::string(body);
}

}  // namespace wire

absl::StatusOr<std::unique_ptr<HttpModelClient>> HttpModelClient::Create(
    std::string_view url, HttpClientOptions options) {
  constexpr std::string_view kScheme = "http://";
  if (!url.starts_with(kScheme)) {
    return absl::InvalidArgumentError(
        absl::StrCat("model URL must start with http://, got \"", ToAbsl(url), "\""));
  }
  std::string_view rest = url.substr(kScheme.size());
  size_t slash = rest.find('/');
  std::string_view authority = rest.substr(0, slash);
  std::string prefix(slash == std::string_view::npos ? "" : rest.substr(slash));
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  if (authority.empty()) {
    return absl::InvalidArgumentError(absl::StrCat("model URL has no host: ", ToAbsl(url)));
  }
  return std::unique_ptr<HttpModelClient>(new HttpModelClient(
      absl::StrCat(ToAbsl(kScheme), ToAbsl(authority)), std::move(prefix), options));
}

absl::StatusOr<std::string> HttpModelClient::Post(std::string_view path,
                                                  const std::string& body) const {
  std::string target = absl::StrCat(prefix_, ToAbsl(path));
  auto backoff = options_.initial_backoff;
  absl::Status last = absl::UnavailableError("no attempt made");
  for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    // One connection per call keeps the client safe for concurrent use.
    httplib::Client client(base_url_);
    auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(options_.timeout);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    httplib::Result res = client.Post(target, body, "application/json");
    if (!res) {
      last = absl::UnavailableError(absl::StrCat(
          "POST ", base_url_, target, ": ", httplib::to_string(res.error())));
      continue;
    }
    if (res->status == 200) return res->body;
    std::string message = absl::StrCat("POST ", base_url_, target, " returned ",
                                       res->status, ": ",
                                       wire::DecodeErrorMessage(res->body));
    if (res->status >= 500 || res->status == 429) {
      last = absl::UnavailableError(message);
      continue;
    }
    return absl::InternalError(absl::StrCat("protocol error: ", message));
  }
  return last;
}

absl::StatusOr<Prediction> HttpModelClient::Predict(std::string_view context,
                                                    std::string_view variable) const {
  absl::StatusOr<std::string> request = wire::EncodePredictRequest(context, variable);
  if (!request.ok()) return request.status();
  absl::StatusOr<std::string> body = Post(wire::kPredictPath, *request);
  if (!body.ok()) return body.status();
  return wire::DecodePredictResponse(*body);
}

absl::StatusOr<std::string> HttpModelClient::Reverse(std::string_view context,
                                                     std::string_view nle) const {
  if (Trim(nle).empty()) {
    return absl::InvalidArgumentError("reverse explainer needs a non-empty NLE");
  }
  absl::StatusOr<std::string> request = wire::EncodeReverseRequest(context, nle);
  if (!request.ok()) return request.status();
  absl::StatusOr<std::string> body = Post(wire::kReversePath, *request);
  if (!body.ok()) return body.status();
  return wire::DecodeReverseResponse(*body);
}

bool HttpModelClient::Healthy() const {
  httplib::Client client(base_url_);
  auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(options_.timeout);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  httplib::Result res = client.Get(absl::StrCat(prefix_, ToAbsl(wire::kHealthPath)));
  return res && res->status == 200 && wire::DecodeHealthResponse(res->body);
}

absl::StatusOr<MockModelClient> MockModelClient::FromFixtureText(
    std::string_view jsonl, MockOptions options) {
  MockModelClient mock(std::move(options));
  int line_no = 0;
  for (std::string_view line : SplitOn(jsonl, '\n')) {
    ++line_no;
    if (Trim(line).empty()) continue;
    json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
    auto bad = [&](std::string_view why) {
      return absl::InvalidArgumentError(
          absl::StrCat("mock fixture line ", line_no, ": ", ToAbsl(why)));
    };
    if (j.is_discarded() || !j.is_object()) return bad("not a JSON object");
    if (!j.contains("op") || !j.contains("context") || !j.contains("out") ||
        !j["out"].is_object()) {
      return bad("needs op, context and out");
    }
    try {
      std::string op = j.at("op").get<std::string>();
      std::string context = j.at("context").get<std::string>();
      const json& out = j.at("out");
      if (op == "predict") {
        mock.AddPrediction(context, j.at("variable").get<std::string>(),
                           {out.at("label").get<std::string>(),
                            out.at("nle").get<std::string>()});
      } else if (op == "reverse") {
        mock.AddReverse(context, j.at("nle").get<std::string>(),
                        out.at("variable").get<std::string>());
      } else {
        return bad(absl::StrCat("unknown op \"", op, "\""));
      }
    } catch (const json::exception& e) {
      return bad(e.what());
    }
  }
  return mock;
}

absl::StatusOr<MockModelClient> MockModelClient::FromFixtureFile(
    const std::string& path, MockOptions options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open mock fixture ", path));
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return FromFixtureText(text, std::move(options));
}

void MockModelClient::AddPrediction(std::string_view context,
                                    std::string_view variable, Prediction out) {
  predictions_[MockKey(context, variable)] = std::move(out);
}

void MockModelClient::AddReverse(std::string_view context, std::string_view nle,
                                 std::string variable) {
  reversals_[MockKey(context, nle)] = std::move(variable);
}

absl::StatusOr<Prediction> MockModelClient::Predict(std::string_view context,
                                                    std::string_view variable) const {
  if (auto it = predictions_.find(MockKey(context, variable)); it != predictions_.end()) {
    return it->second;
  }
  switch (options_.fallback) {
    case MockFallback::kEcho:
      return Prediction{options_.fixed_label, std::string(variable)};
    case MockFallback::kFixedLabel:
      return Prediction{options_.fixed_label, ""};
    case MockFallback::kError:
      break;
  }
  return absl::NotFoundError("mock has no prediction for this input");
}

absl::StatusOr<std::string> MockModelClient::Reverse(std::string_view context,
                                                     std::string_view nle) const {
  if (Trim(nle).empty()) {
    return absl::InvalidArgumentError("reverse explainer needs a non-empty NLE");
  }
  if (auto it = reversals_.find(MockKey(context, nle)); it != reversals_.end()) {
    return it->second;
  }
  if (options_.fallback == MockFallback::kError) {
    return absl::NotFoundError("mock has no reversal for this input");
  }
  return std::string(nle);
}

absl::StatusOr<std::unique_ptr<ModelClient>> MakeModelClient(
    std::string_view endpoint, HttpClientOptions http_options,
    MockOptions mock_options) {
  if (endpoint == "mock") {
    return std::make_unique<MockModelClient>(std::move(mock_options));
  }
  if (endpoint.starts_with("mock:")) {
    absl::StatusOr<MockModelClient> mock = MockModelClient::FromFixtureFile(
        std::string(endpoint.substr(5)), std::move(mock_options));
    if (!mock.ok()) return mock.status();
    return std::make_unique<MockModelClient>(*std::move(mock));
  }
  absl::StatusOr<std::unique_ptr<HttpModelClient>> http =
      HttpModelClient::Create(endpoint, http_options);
  if (!http.ok()) return http.status();
  return std::unique_ptr<ModelClient>(*std::move(http));
}

}  // namespace nleguard
