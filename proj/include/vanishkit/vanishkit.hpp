/*
 * Copyright (c) 2026, The VanishKit Authors.
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

/// Umbrella header: the complete vanishing-point-detection toolkit.

#pragma once

#include <vanishkit/clustering.hpp>
#include <vanishkit/config.hpp>
#include <vanishkit/eval.hpp>
#include <vanishkit/features.hpp>
#include <vanishkit/geometry.hpp>
#include <vanishkit/image.hpp>
#include <vanishkit/image_io.hpp>
#include <vanishkit/linefit.hpp>
#include <vanishkit/pipeline.hpp>
#include <vanishkit/random.hpp>
#include <vanishkit/ransac.hpp>
#include <vanishkit/selection.hpp>
#include <vanishkit/stats.hpp>
#include <vanishkit/synthgen.hpp>
