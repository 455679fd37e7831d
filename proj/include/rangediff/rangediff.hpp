// Copyright 2026 The rangediff Authors
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

#include "rangediff/box.hpp"
#include "rangediff/commands.hpp"
#include "rangediff/config.hpp"
#include "rangediff/core.hpp"
#include "rangediff/denoiser.hpp"
#include "rangediff/diffusion.hpp"
#include "rangediff/imageops.hpp"
#include "rangediff/io.hpp"
#include "rangediff/metrics.hpp"
#include "rangediff/normalize.hpp"
#include "rangediff/pointcloud.hpp"
#include "rangediff/rangeview.hpp"
#include "rangediff/schedule.hpp"
#include "rangediff/toy_data.hpp"
