// Copyright 2026 The ensembleq developers.

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ensembleq {

struct Subsystem {
    std::string label;
    std::size_t dim;

    bool operator==(const Subsystem&) const = default;
};

// Ordered registry of labeled finite-dimensional subsystems. Joint basis
// indices map to digit tuples with the first-listed subsystem most
// significant:
//
//   index = sum_i digit[i] * stride[i],   stride[i] = prod_{j>i} dim[j]
//
// so {spin:2, path:3} encodes (spin=1, path=2) as 1*3 + 2 = 5. Labels are
// unique and every dimension is at least 2.
class SpaceLayout {
  public:
    SpaceLayout() = default;

    SpaceLayout(std::initializer_list<Subsystem> subsystems)
        : SpaceLayout(std::vector<Subsystem>(subsystems)) {}

    explicit SpaceLayout(std::vector<Subsystem> subsystems)
        : subsystems_(std::move(subsystems)) {
        strides_.resize(subsystems_.size());
        total_dim_ = 1;
        for (std::size_t pos = subsystems_.size(); pos-- > 0;) {
            const Subsystem& sub = subsystems_[pos];
            if (sub.dim < 2) {
                throw std::invalid_argument("SpaceLayout: subsystem '" + sub.label +
                                            "' must have dimension >= 2");
            }
            if (sub.label.empty()) {
                throw std::invalid_argument("SpaceLayout: empty subsystem label");
            }
            strides_[pos] = total_dim_;
            total_dim_ *= sub.dim;
        }
        for (std::size_t i = 0; i < subsystems_.size(); ++i) {
            for (std::size_t j = i + 1; j < subsystems_.size(); ++j) {
                if (subsystems_[i].label == subsystems_[j].label) {
                    throw std::invalid_argument("SpaceLayout: duplicate label '" +
                                                subsystems_[i].label + "'");
                }
            }
        }
    }

    std::size_t size() const { return subsystems_.size(); }
    std::size_t total_dim() const { return total_dim_; }
    const std::vector<Subsystem>& subsystems() const { return subsystems_; }
    const Subsystem& subsystem(std::size_t pos) const { return subsystems_.at(pos); }
    std::size_t stride_of(std::size_t pos) const { return strides_.at(pos); }

    bool has_label(std::string_view label) const {
        for (const Subsystem& sub : subsystems_)
            if (sub.label == label) return true;
        return false;
    }

    std::size_t position_of(std::string_view label) const {
        for (std::size_t pos = 0; pos < subsystems_.size(); ++pos)
            if (subsystems_[pos].label == label) return pos;
        throw std::out_of_range("SpaceLayout: unknown label '" + std::string(label) + "'");
    }

    std::size_t dim_of(std::string_view label) const {
        return subsystems_[position_of(label)].dim;
    }

    std::size_t encode(std::span<const std::size_t> digits) const {
        if (digits.size() != subsystems_.size()) {
            throw std::invalid_argument("SpaceLayout::encode: digit count mismatch");
        }
        std::size_t index = 0;
        for (std::size_t pos = 0; pos < digits.size(); ++pos) {
            if (digits[pos] >= subsystems_[pos].dim) {
                throw std::out_of_range("SpaceLayout::encode: digit out of range for '" +
                                        subsystems_[pos].label + "'");
            }
            index += digits[pos] * strides_[pos];
        }
        return index;
    }

    void decode(std::size_t index, std::span<std::size_t> digits) const {
        if (index >= total_dim_) throw std::out_of_range("SpaceLayout::decode: index out of range");
        if (digits.size() != subsystems_.size()) {
            throw std::invalid_argument("SpaceLayout::decode: digit count mismatch");
        }
        for (std::size_t pos = 0; pos < subsystems_.size(); ++pos) {
            digits[pos] = (index / strides_[pos]) % subsystems_[pos].dim;
        }
    }

    std::vector<std::size_t> decode(std::size_t index) const {
        std::vector<std::size_t> digits(subsystems_.size());
        decode(index, digits);
        return digits;
    }

    // Digit of one subsystem without decoding the full tuple.
    std::size_t digit(std::size_t index, std::size_t pos) const {
        return (index / strides_.at(pos)) % subsystems_[pos].dim;
    }

    // Layout of the named subsystems, kept in this layout's order regardless
    // of the order of `keep`.
    SpaceLayout sublayout(const std::vector<std::string>& keep) const {
        if (keep.empty()) throw std::invalid_argument("SpaceLayout::sublayout: empty label set");
        for (const std::string& label : keep) position_of(label);  // unknown labels throw
        std::vector<Subsystem> kept;
        for (const Subsystem& sub : subsystems_) {
            for (const std::string& label : keep) {
                if (sub.label == label) {
                    kept.push_back(sub);
                    break;
                }
            }
        }
        return SpaceLayout(std::move(kept));
    }

    // Labels not in `drop`, in layout order.
    std::vector<std::string> complement(const std::vector<std::string>& drop) const {
        std::vector<std::string> rest;
        for (const Subsystem& sub : subsystems_) {
            bool dropped = false;
            for (const std::string& label : drop) dropped = dropped || sub.label == label;
            if (!dropped) rest.push_back(sub.label);
        }
        return rest;
    }

    bool operator==(const SpaceLayout& other) const { return subsystems_ == other.subsystems_; }

  private:
    std::vector<Subsystem> subsystems_;
    std::vector<std::size_t> strides_;
    std::size_t total_dim_ = 1;
};

// Visits every joint index in encoding order together with its digit tuple.
// The tuple is updated odometer-style, last subsystem fastest.
template <typename F>
inline void for_each_index(const SpaceLayout& layout, F&& visit) {
    std::vector<std::size_t> digits(layout.size(), 0);
    const std::size_t total = layout.total_dim();
    for (std::size_t index = 0; index < total; ++index) {
        visit(index, std::span<const std::size_t>(digits));
        for (std::size_t pos = layout.size(); pos-- > 0;) {
            if (++digits[pos] < layout.subsystem(pos).dim) break;
            digits[pos] = 0;
        }
    }
}

}  // namespace ensembleq
