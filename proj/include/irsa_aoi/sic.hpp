#pragma once

#include <span>
#include <vector>

namespace irsa_aoi {

/// Replica slots of every user transmitting in one frame, stored flat.
class FrameTransmissionSet {
public:
    explicit FrameTransmissionSet(int m);

    /// Adds a user with the given replica slots; returns its index. Slots
    /// must lie in [0, m) and be pairwise distinct.
    int add_user(std::span<const int> slots);
    void clear() noexcept;

    int m() const noexcept { return m_; }
    int users() const noexcept { return static_cast<int>(offsets_.size()) - 1; }
    std::span<const int> slots_of(int user) const;

private:
    int m_;
    std::vector<int> offsets_{0};
    std::vector<int> slots_;
};

struct PeelingStep {
    int user = 0;
    int slot = 0;  ///< the singleton slot the user was recovered from
};

/// Iterative interference cancellation. Buffers are kept between calls so a
/// simulator can reuse one decoder for every frame.
class SicDecoder {
public:
    /// Returns the decoded users in ascending order.
    std::span<const int> decode(const FrameTransmissionSet& tx);

    /// Decoding order of the last call.
    std::span<const PeelingStep> steps() const noexcept { return steps_; }

private:
    std::vector<int> count_;
    std::vector<int> xor_;  // xor of the remaining user ids in each slot
    std::vector<int> singletons_;
    std::vector<int> decoded_;
    std::vector<PeelingStep> steps_;
};

std::vector<int> sic_decode(const FrameTransmissionSet& tx);

}  // namespace irsa_aoi
