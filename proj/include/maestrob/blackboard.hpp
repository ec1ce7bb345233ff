#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace maestrob {

// One bus message. seq is per-topic and strictly increasing from 1.
struct Message {
  std::string topic;
  std::uint64_t seq = 0;
  nlohmann::json payload;
  std::string origin;  // publishing agent, free-form
};

using Handler = std::function<void(const Message&)>;

// Synchronous: publish returns after every matching handler ran.
// Queued: publish only enqueues; drain() performs the deliveries.
enum class DeliveryMode { Synchronous, Queued };

// In-process publish/subscribe bus. Topics are `/`-separated paths with
// non-empty segments; a subscription pattern may end in a `*` segment,
// which matches one or more further segments (`runtime/*` receives
// `runtime/trace` but not `runtime`; bare `*` receives everything).
//
// Deliveries are serialized under one lock, so publishing from several
// threads is safe and handlers never run concurrently. A handler that
// throws produces a `bus/errors` message ({error, topic, seq}) and does
// not stop delivery to the remaining handlers. Re-entrant publishing is
// allowed up to a nesting depth of 16; beyond that publish throws
// CycleError listing the topic chain.
class Blackboard {
 public:
  explicit Blackboard(DeliveryMode mode = DeliveryMode::Synchronous) : mode_(mode) {}

  // Throws BusClosedError after close(), ValidationError on a bad topic.
  std::uint64_t publish(const std::string& topic, nlohmann::json payload,
                        const std::string& origin = "");

  // Handler sees every matching message published after this call; no
  // replay. Returns the subscription id. Throws InvalidPatternError.
  std::uint64_t subscribe(const std::string& pattern, Handler handler);

  // Unknown ids are ignored; callable from inside a handler.
  void unsubscribe(std::uint64_t id);

  // Writes each matching message to `sink` as one compact JSON line with
  // fields {payload, seq, topic}. A failed write terminates the
  // subscription and posts a notice on `bus/errors`.
  std::uint64_t bridge_export(const std::string& pattern, std::ostream& sink);

  // Queued mode: deliver everything pending (including messages enqueued
  // by handlers while draining). Returns the number delivered.
  std::size_t drain();

  // Idempotent. Pending queued messages are discarded.
  void close();
  bool closed() const;

  static bool valid_topic(const std::string& topic);
  static bool valid_pattern(const std::string& pattern);
  static bool topic_matches(const std::string& topic, const std::string& pattern);

 private:
  struct Subscription {
    std::string pattern;
    Handler handler;
  };

  void deliver(const Message& m);
  void post_error_notice(const Message& failed, const std::string& what);

  DeliveryMode mode_;
  mutable std::recursive_mutex mu_;
  bool closed_ = false;
  std::uint64_t next_id_ = 1;
  std::map<std::uint64_t, Subscription> subs_;
  std::map<std::string, std::uint64_t> seqs_;
  std::deque<Message> queue_;
  std::vector<std::string> stack_;  // topics currently being delivered
};

}  // namespace maestrob
