/*
 * Copyright 2026 The ab2h Authors.
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

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace ab2h {

// Counts live ring-element slots held by protocol working buffers. This is
// the deterministic stand-in for resident memory: a slot is 8 bytes of
// share data, wherever it lives.
class MemoryMeter {
 public:
  void acquire(std::size_t slots) noexcept {
    current_ += slots;
    peak_ = std::max(peak_, current_);
  }
  void release(std::size_t slots) noexcept {
    current_ -= std::min(slots, current_);
  }

  std::size_t current() const noexcept { return current_; }
  std::size_t peak() const noexcept { return peak_; }

  // Only between runs.
  void reset() noexcept {
    current_ = 0;
    peak_ = 0;
  }

  // The meter that buffers constructed on this thread charge, or null.
  static MemoryMeter* active() noexcept { return active_; }

 private:
  friend class MeterScope;

  std::size_t current_ = 0;
  std::size_t peak_ = 0;
  inline static thread_local MemoryMeter* active_ = nullptr;
};

// Installs a meter as the active one for the current thread.
class MeterScope {
 public:
  explicit MeterScope(MemoryMeter& meter) noexcept
      : previous_(MemoryMeter::active_) {
    MemoryMeter::active_ = &meter;
  }
  ~MeterScope() { MemoryMeter::active_ = previous_; }

  MeterScope(const MeterScope&) = delete;
  MeterScope& operator=(const MeterScope&) = delete;

 private:
  MemoryMeter* previous_;
};

// Charges a fixed number of slots for as long as it lives. Used for
// transient byte buffers (serialized payloads) that are not RingBuffers.
class MeterCharge {
 public:
  explicit MeterCharge(std::size_t slots) noexcept
      : meter_(MemoryMeter::active()), slots_(slots) {
    if (meter_ != nullptr) meter_->acquire(slots_);
  }
  ~MeterCharge() {
    if (meter_ != nullptr) meter_->release(slots_);
  }

  MeterCharge(const MeterCharge&) = delete;
  MeterCharge& operator=(const MeterCharge&) = delete;

 private:
  MemoryMeter* meter_;
  std::size_t slots_;
};

inline std::size_t slots_for_bytes(std::size_t bytes) noexcept {
  return (bytes + 7) / 8;
}

// A vector of ring elements that charges the meter active at construction.
class RingBuffer {
 public:
  RingBuffer() noexcept : meter_(MemoryMeter::active()) {}
  explicit RingBuffer(std::size_t n, std::uint64_t value = 0)
      : meter_(MemoryMeter::active()), data_(n, value) {
    charge(n);
  }
  RingBuffer(const RingBuffer& other)
      : meter_(MemoryMeter::active()), data_(other.data_) {
    charge(data_.size());
  }
  RingBuffer(RingBuffer&& other) noexcept
      : meter_(other.meter_), data_(std::move(other.data_)) {
    other.data_.clear();
  }
  RingBuffer& operator=(const RingBuffer& other) {
    if (this != &other) {
      RingBuffer copy(other);
      swap(copy);
    }
    return *this;
  }
  RingBuffer& operator=(RingBuffer&& other) noexcept {
    if (this != &other) {
      discharge(data_.size());
      meter_ = other.meter_;
      data_ = std::move(other.data_);
      other.data_.clear();
    }
    return *this;
  }
  ~RingBuffer() { discharge(data_.size()); }

  void swap(RingBuffer& other) noexcept {
    std::swap(meter_, other.meter_);
    data_.swap(other.data_);
  }

  void resize(std::size_t n, std::uint64_t value = 0) {
    if (n > data_.size()) {
      charge(n - data_.size());
    } else {
      discharge(data_.size() - n);
    }
    data_.resize(n, value);
  }

  void release() {
    discharge(data_.size());
    data_.clear();
    data_.shrink_to_fit();
  }

  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }
  std::uint64_t* data() noexcept { return data_.data(); }
  const std::uint64_t* data() const noexcept { return data_.data(); }
  std::uint64_t& operator[](std::size_t i) noexcept { return data_[i]; }
  std::uint64_t operator[](std::size_t i) const noexcept { return data_[i]; }
  auto begin() noexcept { return data_.begin(); }
  auto end() noexcept { return data_.end(); }
  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }

  std::span<std::uint64_t> span() noexcept { return data_; }
  std::span<const std::uint64_t> span() const noexcept { return data_; }
  operator std::span<const std::uint64_t>() const noexcept { return data_; }

  friend bool operator==(const RingBuffer& a, const RingBuffer& b) {
    return a.data_ == b.data_;
  }

 private:
  void charge(std::size_t n) noexcept {
    if (meter_ != nullptr) meter_->acquire(n);
  }
  void discharge(std::size_t n) noexcept {
    if (meter_ != nullptr) meter_->release(n);
  }

  MemoryMeter* meter_;
  std::vector<std::uint64_t> data_;
};

}  // namespace ab2h
