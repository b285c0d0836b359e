#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "commplan/consensus.hpp"
#include "commplan/link_model.hpp"

namespace commplan {

enum class PayloadKind : std::uint8_t { Adjacency = 1, Convergence = 2, Trade = 3 };

struct MessageEnvelope {
  std::size_t sender = 0;
  std::size_t receiver = 0;
  std::int64_t step = 0;  // step at which it was sent
  PayloadKind kind = PayloadKind::Trade;
  std::vector<std::uint8_t> payload;
};

// Payload codecs. Values are stored as raw little-endian IEEE doubles /
// two's-complement integers so a decode reproduces the sender's bits.
std::vector<std::uint8_t> encode_matrix(const Mat& m);
Mat decode_matrix(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_convergence(const ConvergenceState& s);
ConvergenceState decode_convergence(std::span<const std::uint8_t> bytes, std::size_t owner);
std::vector<std::uint8_t> encode_trade(double trade);
double decode_trade(std::span<const std::uint8_t> bytes);

using Inboxes = std::vector<std::vector<MessageEnvelope>>;

/// Validates that every message goes to a current neighbour of its sender
/// (throws ProtocolError otherwise) and sorts them into per-receiver inboxes
/// for step `step + 1`. Inbox order is (sender, kind), independent of send order.
Inboxes deliver(std::span<const MessageEnvelope> messages, const EdgeSet& edges, std::int64_t step,
                std::size_t n_robots);

/// Holds the messages of one step until the next barrier.
class MessageBus {
 public:
  explicit MessageBus(std::size_t n_robots) : n_robots_(n_robots) {}

  // Rejects non-neighbour sends immediately.
  void post(MessageEnvelope msg, const EdgeSet& edges_at_send);

  // Everything posted during step - 1, grouped by receiver; clears the buffer.
  Inboxes collect(std::int64_t step);

  std::size_t pending() const { return pending_.size(); }

 private:
  std::size_t n_robots_;
  std::vector<MessageEnvelope> pending_;
};

}  // namespace commplan
