// Copyright 2026 The cpsre Authors
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

// Matching recurses on the native stack, one handful of frames per
// compiled node entered. Deep runs therefore need a thread with a stack
// sized for the configured depth limit.

#pragma once

#include <pthread.h>

#include <cstddef>
#include <optional>
#include <type_traits>
#include <utility>

namespace cpsre {

// Upper estimate of native stack consumed per unit of matcher depth with
// a probe attached. tests/unit/stack_test.cpp measures the real figure
// (about 760 bytes optimized and 1850 unoptimized on x86-64 GCC 11).
#ifdef NDEBUG
inline constexpr std::size_t kStackBytesPerDepth = 1024;
#else
inline constexpr std::size_t kStackBytesPerDepth = 2560;
#endif

inline std::size_t stack_bytes_for_depth(std::size_t max_depth) {
  constexpr std::size_t kSlack = std::size_t{16} << 20;
  return max_depth * kStackBytesPerDepth + kSlack;
}

// Runs fn() on a fresh thread with the given stack size and returns its
// result. Falls back to the calling thread if the thread cannot start.
template <class F>
std::invoke_result_t<F&> run_with_stack(std::size_t stack_bytes, F&& fn) {
  using R = std::invoke_result_t<F&>;
  using Fn = std::remove_reference_t<F>;
  struct Job {
    Fn* fn;
    std::conditional_t<std::is_void_v<R>, bool, std::optional<R>> result{};
    static void* run(void* p) {
      auto* job = static_cast<Job*>(p);
      if constexpr (std::is_void_v<R>) {
        (*job->fn)();
        job->result = true;
      } else {
        job->result.emplace((*job->fn)());
      }
      return nullptr;
    }
  };
  Job job{&fn, {}};
  pthread_attr_t attr;
  bool started = false;
  pthread_t thread;
  if (pthread_attr_init(&attr) == 0) {
    if (pthread_attr_setstacksize(&attr, stack_bytes) == 0 &&
        pthread_create(&thread, &attr, &Job::run, &job) == 0) {
      started = true;
      pthread_join(thread, nullptr);
    }
    pthread_attr_destroy(&attr);
  }
  if (!started) Job::run(&job);
  if constexpr (!std::is_void_v<R>) return std::move(*job.result);
}

}  // namespace cpsre
