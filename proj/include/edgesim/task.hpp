// Copyright 2026 The edgesim Authors.
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

#pragma once

namespace edgesim {

// One computation task. At most one task arrives per device per slot, so
// (device, birth_slot) is unique; id is unique across the whole run.
struct Task {
  long id = 0;
  int device = 0;
  int birth_slot = 0;      // slot of arrival, 1-based
  double size_bits = 0.0;
  double density = 0.0;    // CPU cycles required per bit
  int deadline_slot = 0;   // last slot in which the task may finish
};

}  // namespace edgesim
