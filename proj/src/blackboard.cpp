#include "maestrob/blackboard.hpp"

#include <utility>

#include "maestrob/errors.hpp"

namespace maestrob {
namespace {

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : path) {
    if (c == '/') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

bool Blackboard::valid_topic(const std::string& topic) {
  if (topic.empty()) return false;
  for (const std::string& seg : split_path(topic))
    if (seg.empty() || seg.find('*') != std::string::npos) return false;
  return true;
}

bool Blackboard::valid_pattern(const std::string& pattern) {
  if (pattern.empty()) return false;
  auto segs = split_path(pattern);
  for (size_t i = 0; i < segs.size(); ++i) {
    if (segs[i].empty()) return false;
    if (segs[i].find('*') != std::string::npos && (segs[i] != "*" || i + 1 != segs.size()))
      return false;
  }
  return true;
}

bool Blackboard::topic_matches(const std::string& topic, const std::string& pattern) {
  auto ts = split_path(topic);
  auto ps = split_path(pattern);
  if (ps.back() != "*") return topic == pattern;
  if (ts.size() < ps.size()) return false;  // the `*` stands for >= 1 segment
  for (size_t i = 0; i + 1 < ps.size(); ++i)
    if (ts[i] != ps[i]) return false;
  return true;
}

std::uint64_t Blackboard::publish(const std::string& topic, nlohmann::json payload,
                                  const std::string& origin) {
  std::lock_guard<std::recursive_mutex> lock(mu_);
  if (closed_) throw BusClosedError();
  if (!valid_topic(topic)) throw ValidationError("invalid topic '" + topic + "'");

  Message m;
  m.topic = topic;
  m.seq = ++seqs_[topic];
  m.payload = std::move(payload);
  m.origin = origin;

  if (mode_ == DeliveryMode::Queued) {
    queue_.push_back(std::move(m));
    return queue_.back().seq;
  }
  std::uint64_t seq = m.seq;
  deliver(m);
  return seq;
}

void Blackboard::deliver(const Message& m) {
  if (stack_.size() >= 16) {
    std::vector<std::string> chain = stack_;
    chain.push_back(m.topic);
    throw CycleError(std::move(chain));
  }
  stack_.push_back(m.topic);

  // Snapshot so handlers may (un)subscribe; late subscribers miss m.
  std::vector<std::pair<std::uint64_t, Handler>> targets;
  for (const auto& [id, sub] : subs_)
    if (topic_matches(m.topic, sub.pattern)) targets.emplace_back(id, sub.handler);

  for (const auto& [id, handler] : targets) {
    if (!subs_.count(id)) continue;  // unsubscribed by an earlier handler
    try {
      handler(m);
    } catch (const std::exception& e) {
      post_error_notice(m, e.what());
    } catch (...) {
      post_error_notice(m, "unknown error");
    }
  }
  stack_.pop_back();
}

void Blackboard::post_error_notice(const Message& failed, const std::string& what) {
  if (failed.topic == "bus/errors") return;  // no notices about notices
  nlohmann::json payload{{"error", what}, {"topic", failed.topic}, {"seq", failed.seq}};
  try {
    Message m;
    m.topic = "bus/errors";
    m.seq = ++seqs_[m.topic];
    m.payload = std::move(payload);
    if (mode_ == DeliveryMode::Queued) {
      queue_.push_back(std::move(m));
    } else {
      deliver(m);
    }
  } catch (...) {
    // a bus/errors delivery failure (e.g. depth exhausted) is dropped
  }
}

std::uint64_t Blackboard::subscribe(const std::string& pattern, Handler handler) {
  std::lock_guard<std::recursive_mutex> lock(mu_);
  if (closed_) throw BusClosedError();
  if (!valid_pattern(pattern)) throw InvalidPatternError(pattern);
  std::uint64_t id = next_id_++;
  subs_.emplace(id, Subscription{pattern, std::move(handler)});
  return id;
}

void Blackboard::unsubscribe(std::uint64_t id) {
  std::lock_guard<std::recursive_mutex> lock(mu_);
  subs_.erase(id);
}

std::uint64_t Blackboard::bridge_export(const std::string& pattern, std::ostream& sink) {
  std::lock_guard<std::recursive_mutex> lock(mu_);
  if (closed_) throw BusClosedError();
  if (!valid_pattern(pattern)) throw InvalidPatternError(pattern);
  std::uint64_t id = next_id_++;
  std::ostream* out = &sink;
  subs_.emplace(id, Subscription{pattern, [this, id, out, pattern](const Message& m) {
                  nlohmann::json line{{"topic", m.topic}, {"seq", m.seq}, {"payload", m.payload}};
                  *out << line.dump() << '\n';
                  if (!*out) {
                    unsubscribe(id);
                    throw Error("bridge sink failed for pattern '" + pattern + "'");
                  }
                }});
  return id;
}

std::size_t Blackboard::drain() {
  std::lock_guard<std::recursive_mutex> lock(mu_);
  std::size_t delivered = 0;
  while (!queue_.empty()) {
    Message m = std::move(queue_.front());
    queue_.pop_front();
    deliver(m);
    ++delivered;
  }
  return delivered;
}

void Blackboard::close() {
  std::lock_guard<std::recursive_mutex> lock(mu_);
  closed_ = true;
  queue_.clear();
  subs_.clear();
}

bool Blackboard::closed() const {
  std::lock_guard<std::recursive_mutex> lock(mu_);
  return closed_;
}

}  // namespace maestrob
