// Copyright 2026 The DP-PSI Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Umbrella header.

#include "dppsi/accountant.h"
#include "dppsi/error.h"
#include "dppsi/group.h"
#include "dppsi/io.h"
#include "dppsi/mechanisms.h"
#include "dppsi/oracles.h"
#include "dppsi/protocol.h"
#include "dppsi/random.h"
#include "dppsi/runner.h"
#include "dppsi/synthetic.h"
#include "dppsi/transport.h"
#include "dppsi/wire.h"
