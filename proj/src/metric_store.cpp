/*
 * Copyright 2026 The chainrca Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "chainrca/metric_store.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace chainrca {

using nlohmann::json;

namespace {

void require(bool condition, const std::string& reason) {
  if (!condition) {
    throw std::invalid_argument("record rejected: " + reason);
  }
}

}  // namespace

void MetricStore::EdgeData::upsert(const CallRecord& r) {
  if (minutes.empty() || r.minute > minutes.back()) {
    minutes.push_back(r.minute);
    rt.push_back(r.rt_ms);
    ec.push_back(r.error_count);
    qps.push_back(r.qps);
    req.push_back(r.request_count);
    return;
  }
  const auto it = std::lower_bound(minutes.begin(), minutes.end(), r.minute);
  const auto idx = static_cast<std::size_t>(it - minutes.begin());
  if (it != minutes.end() && *it == r.minute) {
    rt[idx] = r.rt_ms;
    ec[idx] = r.error_count;
    qps[idx] = r.qps;
    req[idx] = r.request_count;
  } else {
    minutes.insert(it, r.minute);
    rt.insert(rt.begin() + idx, r.rt_ms);
    ec.insert(ec.begin() + idx, r.error_count);
    qps.insert(qps.begin() + idx, r.qps);
    req.insert(req.begin() + idx, r.request_count);
  }
}

void MetricStore::BusinessData::upsert(Minute minute, double value) {
  if (minutes.empty() || minute > minutes.back()) {
    minutes.push_back(minute);
    values.push_back(value);
    return;
  }
  const auto it = std::lower_bound(minutes.begin(), minutes.end(), minute);
  const auto idx = static_cast<std::size_t>(it - minutes.begin());
  if (it != minutes.end() && *it == minute) {
    values[idx] = value;
  } else {
    minutes.insert(it, minute);
    values.insert(values.begin() + idx, value);
  }
}

MetricStore::MetricStore(const MetricStore& other)
    : edges_(other.edges_),
      business_(other.business_),
      services_(other.services_),
      earliest_(other.earliest_),
      latest_(other.latest_),
      reads_(other.reads_.load(std::memory_order_relaxed)) {}

MetricStore& MetricStore::operator=(const MetricStore& other) {
  if (this != &other) {
    edges_ = other.edges_;
    business_ = other.business_;
    services_ = other.services_;
    earliest_ = other.earliest_;
    latest_ = other.latest_;
    reads_.store(other.reads_.load(std::memory_order_relaxed), std::memory_order_relaxed);
  }
  return *this;
}

void MetricStore::note_minute(Minute m) {
  if (!earliest_ || m < *earliest_) earliest_ = m;
  if (!latest_ || m > *latest_) latest_ = m;
}

void MetricStore::ingest(const CallRecord& record) {
  require(!record.caller.empty(), "caller is empty");
  require(!record.callee.empty(), "callee is empty");
  require(record.caller != record.callee, "self-call " + record.caller);
  require(record.rt_ms >= 0.0, "negative rt_ms");
  require(record.error_count >= 0.0, "negative error_count");
  require(record.qps >= 0.0, "negative qps");
  require(record.request_count >= 0.0, "negative request_count");
  require(record.error_count <= record.request_count, "error_count exceeds request_count");
  const double expected = record.qps * 60.0;
  const double tol = 0.01 * std::max(expected, record.request_count);
  require(std::abs(record.request_count - expected) <= tol,
          "request_count inconsistent with qps*60");

  edges_[record.edge()].upsert(record);
  services_.insert(record.caller);
  services_.insert(record.callee);
  note_minute(record.minute);
}

void MetricStore::ingest(const BusinessRecord& record) {
  require(!record.service.empty(), "service is empty");
  require(!record.metric_name.empty(), "metric_name is empty");
  business_[{record.service, record.metric_name}].upsert(record.minute, record.value);
  services_.insert(record.service);
  note_minute(record.minute);
}

void MetricStore::fill_window(const std::vector<Minute>& minutes,
                              const std::vector<double>& column, Minute start, std::size_t length,
                              bool forward_fill, double* out) {
  // Position of the first observation >= start, and the fill value carried
  // in from the last observation before the window.
  auto it = std::lower_bound(minutes.begin(), minutes.end(), start);
  double carry = 0.0;
  if (forward_fill && it != minutes.begin()) {
    carry = column[static_cast<std::size_t>(it - minutes.begin()) - 1];
  }
  std::size_t idx = static_cast<std::size_t>(it - minutes.begin());
  for (std::size_t i = 0; i < length; ++i) {
    const Minute m = start + static_cast<Minute>(i);
    if (idx < minutes.size() && minutes[idx] == m) {
      out[i] = column[idx];
      if (forward_fill) carry = column[idx];
      ++idx;
    } else {
      out[i] = forward_fill ? carry : 0.0;
    }
  }
}

Series MetricStore::query_window(const EdgeKey& edge, MetricKind kind, Minute end_minute,
                                 std::size_t length) const {
  if (length == 0) {
    throw std::invalid_argument("query_window: length must be >= 1");
  }
  reads_.fetch_add(1, std::memory_order_relaxed);
  const Minute start = end_minute - static_cast<Minute>(length);
  Series out{std::vector<double>(length, 0.0), start};
  const auto it = edges_.find(edge);
  if (it == edges_.end()) {
    return out;
  }
  const EdgeData& data = it->second;
  switch (kind) {
    case MetricKind::RT:
      fill_window(data.minutes, data.rt, start, length, /*forward_fill=*/true, out.values.data());
      break;
    case MetricKind::EC:
      fill_window(data.minutes, data.ec, start, length, /*forward_fill=*/false, out.values.data());
      break;
    case MetricKind::QPS:
      fill_window(data.minutes, data.qps, start, length, /*forward_fill=*/false,
                  out.values.data());
      break;
  }
  return out;
}

MetricStore::EdgeSpan MetricStore::query_call_span(const EdgeKey& edge, Minute end_minute,
                                                   std::size_t length) const {
  if (length == 0) {
    throw std::invalid_argument("query_call_span: length must be >= 1");
  }
  reads_.fetch_add(1, std::memory_order_relaxed);
  const Minute start = end_minute - static_cast<Minute>(length);
  EdgeSpan span{Series{std::vector<double>(length, 0.0), start},
                Series{std::vector<double>(length, 0.0), start},
                Series{std::vector<double>(length, 0.0), start},
                Series{std::vector<double>(length, 0.0), start}};
  const auto it = edges_.find(edge);
  if (it == edges_.end()) {
    return span;
  }
  const EdgeData& data = it->second;
  fill_window(data.minutes, data.rt, start, length, true, span.rt.values.data());
  fill_window(data.minutes, data.ec, start, length, false, span.ec.values.data());
  fill_window(data.minutes, data.qps, start, length, false, span.qps.values.data());
  fill_window(data.minutes, data.req, start, length, false, span.request_count.values.data());
  return span;
}

Series MetricStore::query_business_window(const std::string& service,
                                          const std::string& metric_name, Minute end_minute,
                                          std::size_t length) const {
  if (length == 0) {
    throw std::invalid_argument("query_business_window: length must be >= 1");
  }
  reads_.fetch_add(1, std::memory_order_relaxed);
  const Minute start = end_minute - static_cast<Minute>(length);
  Series out{std::vector<double>(length, 0.0), start};
  const auto it = business_.find({service, metric_name});
  if (it == business_.end()) {
    return out;
  }
  fill_window(it->second.minutes, it->second.values, start, length, /*forward_fill=*/false,
              out.values.data());
  return out;
}

std::vector<EdgeKey> MetricStore::edges_active(Minute window_end, std::size_t length) const {
  if (length == 0) {
    throw std::invalid_argument("edges_active: length must be >= 1");
  }
  const Minute start = window_end - static_cast<Minute>(length);
  std::vector<EdgeKey> active;
  for (const auto& [edge, data] : edges_) {
    auto it = std::lower_bound(data.minutes.begin(), data.minutes.end(), start);
    for (; it != data.minutes.end() && *it < window_end; ++it) {
      const auto idx = static_cast<std::size_t>(it - data.minutes.begin());
      if (data.req[idx] > 0.0) {
        active.push_back(edge);
        break;
      }
    }
  }
  return active;  // map order keeps this sorted
}

bool MetricStore::knows_service(const std::string& service) const {
  return services_.count(service) > 0;
}

std::vector<std::string> MetricStore::known_services() const {
  return {services_.begin(), services_.end()};
}

std::size_t MetricStore::call_record_count() const {
  std::size_t n = 0;
  for (const auto& [edge, data] : edges_) n += data.minutes.size();
  return n;
}

std::size_t MetricStore::business_record_count() const {
  std::size_t n = 0;
  for (const auto& [key, data] : business_) n += data.minutes.size();
  return n;
}

void MetricStore::save_jsonl(const std::string& path) const {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path);
  }
  for (const auto& [edge, data] : edges_) {
    for (std::size_t i = 0; i < data.minutes.size(); ++i) {
      json line = {{"kind", "call"},          {"minute", data.minutes[i]},
                   {"caller", edge.caller},   {"callee", edge.callee},
                   {"rt_ms", data.rt[i]},     {"error_count", data.ec[i]},
                   {"qps", data.qps[i]},      {"request_count", data.req[i]}};
      out << line.dump() << '\n';
    }
  }
  for (const auto& [key, data] : business_) {
    for (std::size_t i = 0; i < data.minutes.size(); ++i) {
      json line = {{"kind", "business"},
                   {"minute", data.minutes[i]},
                   {"service", key.first},
                   {"metric_name", key.second},
                   {"value", data.values[i]}};
      out << line.dump() << '\n';
    }
  }
}

MetricStore MetricStore::load_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open for reading: " + path);
  }
  MetricStore store;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "call") {
      CallRecord r;
      r.minute = j.at("minute").get<Minute>();
      r.caller = j.at("caller").get<std::string>();
      r.callee = j.at("callee").get<std::string>();
      r.rt_ms = j.at("rt_ms").get<double>();
      r.error_count = j.at("error_count").get<double>();
      r.qps = j.at("qps").get<double>();
      r.request_count = j.at("request_count").get<double>();
      store.ingest(r);
    } else if (kind == "business") {
      BusinessRecord r;
      r.minute = j.at("minute").get<Minute>();
      r.service = j.at("service").get<std::string>();
      r.metric_name = j.at("metric_name").get<std::string>();
      r.value = j.at("value").get<double>();
      store.ingest(r);
    } else {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": unknown kind " + kind);
    }
  }
  return store;
}

}  // namespace chainrca
