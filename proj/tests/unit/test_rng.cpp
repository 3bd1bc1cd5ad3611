// Copyright 2026 The gfsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <set>

#include "doctest.h"
#include "gfsim/feynman_kac.hpp"
#include "gfsim/rng.hpp"

using namespace gfsim;

// Reference blocks from numpy.random.Philox, which increments its counter
// before producing a block; numpy counter c is block c + 1 here.
TEST_SUITE("rng") {
  TEST_CASE("philox known answers, zero key") {
    CHECK(philox4x64_10({1, 0, 0, 0}, {0, 0}) ==
          PhiloxCounter{0x02f4ba6408e4d89bULL, 0x3dd62b0b9ca8c5b2ULL, 0x1c8667a55d902e79ULL, 0x907d7a052fd5b4dcULL});
    CHECK(philox4x64_10({2, 0, 0, 0}, {0, 0}) ==
          PhiloxCounter{0x809bf322883987c3ULL, 0x471128b9e807f7ddULL, 0xf250ba0dbec065b7ULL, 0xfc6ed66767a457bcULL});
  }

  TEST_CASE("philox known answers, nonzero keys") {
    const PhiloxKey k{0x0123456789abcdefULL, 0};
    CHECK(philox4x64_10({1, 0, 0, 0}, k) ==
          PhiloxCounter{0xdaf0bdc754a0b959ULL, 0x38123d82f9ce12cfULL, 0x26cf92e903faab88ULL, 0x1c243f1f4212c6adULL});
    CHECK(philox4x64_10({2, 0, 0, 0}, k) ==
          PhiloxCounter{0xb21f50f322b0bda1ULL, 0xb445706b57af3517ULL, 0x0fb92f165c546c7aULL, 0xce47d53cd7edc6b9ULL});
    CHECK(philox4x64_10({6, 0, 0, 0}, {7, 0}) ==
          PhiloxCounter{0x744d5f450bc87293ULL, 0x5cdae2a625544a9fULL, 0x4efc841430f874e5ULL, 0x1d6a09ff48f17aafULL});
    CHECK(philox4x64_10({7, 0, 0, 0}, {7, 0}) ==
          PhiloxCounter{0x9850fa988f216382ULL, 0x42e1c821b73657aaULL, 0x45457db9d8f7d589ULL, 0xf8b91172d2c99b2fULL});
    CHECK(philox4x64_10({4, 4, 5, 6}, {1, 2}) ==
          PhiloxCounter{0x8070e5788d05927eULL, 0x1c5aef1cb5451508ULL, 0xd04b22ec4863e2a0ULL, 0xd67cc7da10e919ceULL});
  }

  TEST_CASE("stream walks blocks from zero in order") {
    RngStream s(9, 3);
    const auto b0 = philox4x64_10({0, 0, 0, 0}, {9, 3});
    const auto b1 = philox4x64_10({1, 0, 0, 0}, {9, 3});
    for (int i = 0; i < 4; ++i) CHECK(s.next_u64() == b0[i]);
    for (int i = 0; i < 4; ++i) CHECK(s.next_u64() == b1[i]);
  }

  TEST_CASE("substreams are reproducible and distinct") {
    RngStream a(42, 0), b(42, 0), c(42, 1), d(43, 0);
    std::set<std::uint64_t> firsts;
    for (int i = 0; i < 100; ++i) {
      const auto va = a.next_u64();
      CHECK(va == b.next_u64());
      firsts.insert(va);
    }
    CHECK(RngStream(42, 1).next_u64() != RngStream(42, 0).next_u64());
    CHECK(c.next_u64() != d.next_u64());
    CHECK(firsts.size() == 100);
  }

  TEST_CASE("uniform is in the open unit interval with the right mean") {
    RngStream s(1, 1);
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      const double u = s.uniform();
      REQUIRE(u > 0.0);
      REQUIRE(u < 1.0);
      sum += u;
    }
    CHECK(std::abs(sum / n - 0.5) < 5.0 * std::sqrt(1.0 / 12.0 / n));
  }

  TEST_CASE("exponential mean") {
    RngStream s(5, 0);
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) sum += s.exponential(2.0);
    CHECK(std::abs(sum / n - 0.5) < 5.0 * 0.5 / std::sqrt(n));
  }

  TEST_CASE("derived seeds separate experiments") {
    CHECK(derive_seed(1, "malthus") == derive_seed(1, "malthus"));
    CHECK(derive_seed(1, "malthus") != derive_seed(1, "profile-h"));
    CHECK(derive_seed(1, "malthus") != derive_seed(2, "malthus"));
  }
}
