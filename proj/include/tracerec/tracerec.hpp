/**
 * Copyright (c) 2026 The tracerec Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "tracerec/analytics.hpp"
#include "tracerec/bitstring.hpp"
#include "tracerec/channel.hpp"
#include "tracerec/classes.hpp"
#include "tracerec/events.hpp"
#include "tracerec/logmath.hpp"
#include "tracerec/reconstruct.hpp"
#include "tracerec/runs.hpp"
#include "tracerec/stats.hpp"
