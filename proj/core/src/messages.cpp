#include "commplan/messages.hpp"

#include <algorithm>
#include <cstring>
#include <string>

#include "commplan/errors.hpp"

namespace commplan {

namespace {

template <typename T>
void put(std::vector<std::uint8_t>& out, T value) {
  std::uint8_t raw[sizeof(T)];
  std::memcpy(raw, &value, sizeof(T));
  out.insert(out.end(), raw, raw + sizeof(T));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    if (pos_ + sizeof(T) > bytes_.size()) throw ProtocolError("truncated message payload");
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }

  void expect_end() const {
    if (pos_ != bytes_.size()) throw ProtocolError("trailing bytes in message payload");
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_matrix(const Mat& m) {
  std::vector<std::uint8_t> out;
  out.reserve(8 + sizeof(double) * static_cast<std::size_t>(m.size()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(m.rows()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) put<double>(out, m(r, c));
  return out;
}

Mat decode_matrix(std::span<const std::uint8_t> bytes) {
  Reader in(bytes);
  const auto rows = in.get<std::uint32_t>();
  const auto cols = in.get<std::uint32_t>();
  Mat m(rows, cols);
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = in.get<double>();
  in.expect_end();
  return m;
}

std::vector<std::uint8_t> encode_convergence(const ConvergenceState& s) {
  std::vector<std::uint8_t> out;
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.ready.size()));
  for (auto b : s.ready) put<std::uint8_t>(out, b);
  for (auto d : s.dist) put<std::int64_t>(out, d);
  put<std::int64_t>(out, s.switch_at);
  return out;
}

ConvergenceState decode_convergence(std::span<const std::uint8_t> bytes, std::size_t owner) {
  Reader in(bytes);
  const auto n = in.get<std::uint32_t>();
  ConvergenceState s;
  s.owner = owner;
  s.ready.resize(n);
  s.dist.resize(n);
  for (auto& b : s.ready) b = in.get<std::uint8_t>();
  for (auto& d : s.dist) d = in.get<std::int64_t>();
  s.switch_at = in.get<std::int64_t>();
  in.expect_end();
  return s;
}

std::vector<std::uint8_t> encode_trade(double trade) {
  std::vector<std::uint8_t> out;
  put<double>(out, trade);
  return out;
}

double decode_trade(std::span<const std::uint8_t> bytes) {
  Reader in(bytes);
  const double t = in.get<double>();
  in.expect_end();
  return t;
}

Inboxes deliver(std::span<const MessageEnvelope> messages, const EdgeSet& edges, std::int64_t step,
                std::size_t n_robots) {
  Inboxes inboxes(n_robots);
  for (const auto& msg : messages) {
    if (msg.step != step) throw ProtocolError("message stamped with a different step");
    if (msg.receiver >= n_robots || msg.sender >= n_robots || !edges.contains(msg.sender, msg.receiver)) {
      throw ProtocolError("robot " + std::to_string(msg.sender) + " sent to non-neighbour " +
                          std::to_string(msg.receiver));
    }
    inboxes[msg.receiver].push_back(msg);
  }
  for (auto& box : inboxes) {
    std::stable_sort(box.begin(), box.end(), [](const MessageEnvelope& a, const MessageEnvelope& b) {
      return a.sender != b.sender ? a.sender < b.sender : a.kind < b.kind;
    });
  }
  return inboxes;
}

void MessageBus::post(MessageEnvelope msg, const EdgeSet& edges_at_send) {
  if (msg.sender == msg.receiver || !edges_at_send.contains(msg.sender, msg.receiver)) {
    throw ProtocolError("robot " + std::to_string(msg.sender) + " sent to non-neighbour " +
                        std::to_string(msg.receiver));
  }
  if (!pending_.empty() && pending_.front().step != msg.step) {
    throw ProtocolError("messages from two different steps pending at once");
  }
  pending_.push_back(std::move(msg));
}

Inboxes MessageBus::collect(std::int64_t step) {
  Inboxes inboxes(n_robots_);
  for (auto& msg : pending_) {
    if (msg.step != step - 1) throw ProtocolError("stale message in bus");
    inboxes[msg.receiver].push_back(std::move(msg));
  }
  pending_.clear();
  for (auto& box : inboxes) {
    std::stable_sort(box.begin(), box.end(), [](const MessageEnvelope& a, const MessageEnvelope& b) {
      return a.sender != b.sender ? a.sender < b.sender : a.kind < b.kind;
    });
  }
  return inboxes;
}

}  // namespace commplan
