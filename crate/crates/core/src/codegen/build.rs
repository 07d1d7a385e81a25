use std::fmt::Write;

use super::{BuildFlavor, WrapperPlan, INITIATOR_HEADER, TOP_HEADER, WRAPPER_SOURCE};

/// Renders the build script for the plan's flavor. SystemC and the FMI 3.0
/// headers are located through `SYSTEMC_HOME` and `FMI3_INCLUDE_DIR`.
pub fn render_build(plan: &WrapperPlan) -> String {
    match plan.build_flavor {
        BuildFlavor::Cmake => render_cmake(plan),
        BuildFlavor::ShellScript => render_shell(plan),
    }
}

fn render_cmake(plan: &WrapperPlan) -> String {
    let name = &plan.model_name;
    let mut out = String::new();
    writeln!(out, "# Generated by tlm2fmu for model '{name}'. Do not edit.").unwrap();
    out.push_str("cmake_minimum_required(VERSION 3.16)\n");
    writeln!(out, "project({name} LANGUAGES CXX)\n").unwrap();
    out.push_str("set(CMAKE_CXX_STANDARD 17)\nset(CMAKE_CXX_STANDARD_REQUIRED ON)\n\n");
    out.push_str("if(NOT DEFINED ENV{SYSTEMC_HOME})\n  message(FATAL_ERROR \"SYSTEMC_HOME must point to a SystemC installation\")\nendif()\n");
    out.push_str("if(NOT DEFINED ENV{FMI3_INCLUDE_DIR})\n  message(FATAL_ERROR \"FMI3_INCLUDE_DIR must point to the FMI 3.0 headers\")\nendif()\n\n");
    writeln!(out, "add_library({name} SHARED").unwrap();
    for file in [WRAPPER_SOURCE, INITIATOR_HEADER, TOP_HEADER] {
        writeln!(out, "  ${{CMAKE_CURRENT_SOURCE_DIR}}/{file}").unwrap();
    }
    for src in &plan.target_sources {
        writeln!(out, "  ${{CMAKE_CURRENT_SOURCE_DIR}}/{}", plan.relative(src)).unwrap();
    }
    out.push_str(")\n");
    writeln!(out, "set_target_properties({name} PROPERTIES PREFIX \"\" POSITION_INDEPENDENT_CODE ON)").unwrap();
    writeln!(out, "target_include_directories({name} PRIVATE").unwrap();
    out.push_str("  ${CMAKE_CURRENT_SOURCE_DIR}\n");
    for dir in plan.include_dirs() {
        writeln!(out, "  ${{CMAKE_CURRENT_SOURCE_DIR}}/{dir}").unwrap();
    }
    out.push_str("  $ENV{SYSTEMC_HOME}/include\n  $ENV{FMI3_INCLUDE_DIR})\n");
    writeln!(out, "target_link_directories({name} PRIVATE $ENV{{SYSTEMC_HOME}}/lib $ENV{{SYSTEMC_HOME}}/lib-linux64)").unwrap();
    writeln!(out, "target_link_libraries({name} PRIVATE systemc)").unwrap();
    out
}

fn render_shell(plan: &WrapperPlan) -> String {
    let name = &plan.model_name;
    let mut out = String::from("#!/bin/sh\n");
    writeln!(out, "# Generated by tlm2fmu for model '{name}'. Do not edit.").unwrap();
    out.push_str("set -eu\n\n");
    out.push_str(": \"${SYSTEMC_HOME:?SYSTEMC_HOME must point to a SystemC installation}\"\n");
    out.push_str(": \"${FMI3_INCLUDE_DIR:?FMI3_INCLUDE_DIR must point to the FMI 3.0 headers}\"\n\n");
    out.push_str("HERE=$(cd \"$(dirname \"$0\")\" && pwd)\n");
    out.push_str("CXX=${CXX:-c++}\n");
    out.push_str("case \"$(uname -s)\" in\n  Darwin) EXT=dylib; SHARED=-dynamiclib ;;\n  *) EXT=so; SHARED=-shared ;;\nesac\n\n");
    writeln!(out, "\"$CXX\" -std=c++17 -fPIC $SHARED -o \"$HERE/{name}.$EXT\" \\").unwrap();
    out.push_str("  -I\"$HERE\" \\\n");
    for dir in plan.include_dirs() {
        writeln!(out, "  -I\"$HERE/{dir}\" \\").unwrap();
    }
    out.push_str("  -I\"$SYSTEMC_HOME/include\" -I\"$FMI3_INCLUDE_DIR\" \\\n");
    writeln!(out, "  \"$HERE/{WRAPPER_SOURCE}\" \\").unwrap();
    for src in &plan.target_sources {
        writeln!(out, "  \"$HERE/{}\" \\", plan.relative(src)).unwrap();
    }
    out.push_str("  -L\"$SYSTEMC_HOME/lib\" -L\"$SYSTEMC_HOME/lib-linux64\" \\\n");
    out.push_str("  -Wl,-rpath,\"$SYSTEMC_HOME/lib\" -Wl,-rpath,\"$SYSTEMC_HOME/lib-linux64\" \\\n");
    out.push_str("  -lsystemc\n");
    out
}

#[cfg(test)]
mod tests {
    use super::super::test_support::*;
    use super::*;

    #[test]
    fn cmake_lists_every_source() {
        let text = render_build(&echo_plan());
        for file in ["fmu_wrapper.cpp", "initiator.h", "top.h", "../../src/echo.cpp"] {
            assert!(text.contains(&format!("${{CMAKE_CURRENT_SOURCE_DIR}}/{file}")), "{file}");
        }
        assert!(text.contains("add_library(tlm SHARED"));
        assert!(text.contains("$ENV{SYSTEMC_HOME}/include"));
        assert!(text.contains("$ENV{FMI3_INCLUDE_DIR}"));
    }

    #[test]
    fn shell_is_one_compile_and_link() {
        let plan = plan_for(&[("echo.h", ECHO_H), ("echo.cpp", ECHO_CPP)], BuildFlavor::ShellScript);
        let text = render_build(&plan);
        assert!(text.starts_with("#!/bin/sh\n"));
        assert_eq!(text.matches("\"$CXX\"").count(), 1);
        assert!(text.contains("\"$HERE/../../src/echo.cpp\""));
        assert!(text.contains("-lsystemc"));
    }
}
