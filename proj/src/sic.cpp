#include "irsa_aoi/sic.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/core.h>

namespace irsa_aoi {

FrameTransmissionSet::FrameTransmissionSet(int m) : m_(m)
{
    if (m < 1)
        throw std::invalid_argument("frame size must be >= 1");
}

int FrameTransmissionSet::add_user(std::span<const int> slots)
{
    if (slots.empty() || static_cast<int>(slots.size()) > m_)
        throw std::invalid_argument(fmt::format("user needs between 1 and {} replicas", m_));
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (slots[i] < 0 || slots[i] >= m_)
            throw std::out_of_range(fmt::format("slot {} outside [0, {})", slots[i], m_));
        for (std::size_t j = 0; j < i; ++j)
            if (slots[j] == slots[i])
                throw std::invalid_argument(fmt::format("slot {} used twice by one user", slots[i]));
    }
    slots_.insert(slots_.end(), slots.begin(), slots.end());
    offsets_.push_back(static_cast<int>(slots_.size()));
    return users() - 1;
}

void FrameTransmissionSet::clear() noexcept
{
    offsets_.resize(1);
    slots_.clear();
}

std::span<const int> FrameTransmissionSet::slots_of(int user) const
{
    if (user < 0 || user >= users())
        throw std::out_of_range(fmt::format("user {} not in frame", user));
    const auto begin = static_cast<std::size_t>(offsets_[user]);
    const auto end = static_cast<std::size_t>(offsets_[user + 1]);
    return std::span<const int>(slots_).subspan(begin, end - begin);
}

std::span<const int> SicDecoder::decode(const FrameTransmissionSet& tx)
{
    const auto m = static_cast<std::size_t>(tx.m());
    const int users = tx.users();
    count_.assign(m, 0);
    xor_.assign(m, 0);
    singletons_.clear();
    decoded_.clear();
    steps_.clear();

    for (int u = 0; u < users; ++u)
        for (int s : tx.slots_of(u)) {
            ++count_[s];
            xor_[s] ^= u;
        }
    for (std::size_t s = 0; s < m; ++s)
        if (count_[s] == 1)
            singletons_.push_back(static_cast<int>(s));

    while (!singletons_.empty()) {
        const int s = singletons_.back();
        singletons_.pop_back();
        if (count_[s] != 1)
            continue;  // emptied by an earlier cancellation
        const int u = xor_[s];
        decoded_.push_back(u);
        steps_.push_back({u, s});
        for (int r : tx.slots_of(u)) {
            --count_[r];
            xor_[r] ^= u;
            if (count_[r] == 1)
                singletons_.push_back(r);
        }
    }
    std::sort(decoded_.begin(), decoded_.end());
    return decoded_;
}

std::vector<int> sic_decode(const FrameTransmissionSet& tx)
{
    SicDecoder decoder;
    auto out = decoder.decode(tx);
    return {out.begin(), out.end()};
}

}  // namespace irsa_aoi
