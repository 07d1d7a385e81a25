mod common;

use std::collections::BTreeMap;
use std::fs;

use common::{fixture_dir, fixture_plan, manifest_dir};
use tlm2fmu::codegen::{generate, BuildFlavor, GeneratedTree};
use tlm2fmu::fmi_map::parse_xml;

/// Regenerate with `UPDATE_GOLDEN=1 cargo test --test codegen_fixtures`.
#[test]
fn ecc_tree_matches_golden_directory() {
    let golden = fixture_dir("golden/ecc");
    let tree = generate(&fixture_plan("ecc", &golden, BuildFlavor::Cmake)).unwrap();
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        let _ = fs::remove_dir_all(&golden);
        tree.write().unwrap();
    }
    let mut on_disk = BTreeMap::new();
    for entry in fs::read_dir(&golden).unwrap() {
        let path = entry.unwrap().path();
        on_disk.insert(path.clone(), fs::read_to_string(&path).unwrap());
    }
    assert_eq!(on_disk.keys().collect::<Vec<_>>(), tree.files.keys().collect::<Vec<_>>());
    for (path, text) in &tree.files {
        assert_eq!(&on_disk[path], text, "{} differs from golden", path.display());
    }
}

fn interface_sections(tree: &GeneratedTree) -> (String, String) {
    let wrapper = tree.file("fmu_wrapper.cpp").unwrap();
    let mut setters = String::new();
    let mut getters = String::new();
    for chunk in wrapper.split("\nfmi3Status ").skip(1) {
        let body = &chunk[..chunk.find("\n}\n").unwrap()];
        if body.starts_with("fmi3Set") {
            setters.push_str(body);
        } else if body.starts_with("fmi3Get") {
            getters.push_str(body);
        }
    }
    (setters, getters)
}

/// Parameter names of a rendered signature such as `void f(int a, bool& b`.
fn params(sig: &str) -> Vec<String> {
    let list = &sig[sig.find('(').unwrap() + 1..];
    list.split(", ").map(|p| p.rsplit([' ', '&']).next().unwrap().to_string()).collect()
}

#[test]
fn every_variable_has_exactly_one_accessor_path() {
    let out = std::env::temp_dir().join("tlm2fmu-accessors");
    for name in ["echo", "i2c", "ecc", "two_records"] {
        let plan = fixture_plan(name, &out, BuildFlavor::ShellScript);
        let tree = generate(&plan).unwrap();
        let (setters, getters) = interface_sections(&tree);
        let top = tree.file("top.h").unwrap();
        let set_sig = &top[top.find("void set_and_send(").unwrap()..];
        let set_params = params(&set_sig[..set_sig.find(')').unwrap()]);
        let get_sig = &top[top.find("void retrieve_result(").unwrap()..];
        let get_params = params(&get_sig[..get_sig.find(')').unwrap()]);
        for v in plan.md.inputs() {
            let needle = format!("fmu->{} ", v.name);
            let copy = format!("fmu->{}, values[i]", v.name);
            let hits = setters.matches(&needle).count() + setters.matches(&copy).count();
            assert_eq!(hits, 1, "{name}: setter paths for {}", v.name);
            let field = v.name.strip_prefix("fmi_").unwrap();
            assert_eq!(set_params.iter().filter(|p| *p == field).count(), 1, "{name}: {field} in set_and_send");
        }
        for v in plan.md.outputs() {
            assert_eq!(getters.matches(&format!("fmu->{};", v.name)).count(), 1, "{name}: getter for {}", v.name);
            let field = v.name.strip_prefix("fmi_").unwrap();
            assert_eq!(get_params.iter().filter(|p| *p == field).count(), 1, "{name}: {field} in retrieve_result");
        }
        assert_eq!(parse_xml(tree.file("modelDescription.xml").unwrap()).unwrap(), plan.md);
        let wrapper = tree.file("fmu_wrapper.cpp").unwrap();
        let do_step = &wrapper[wrapper.find("fmi3Status fmi3DoStep(").unwrap()..];
        let do_step = &do_step[..do_step.find("\n}\n").unwrap()];
        assert_eq!(do_step.matches("sc_start(").count(), 1);
        assert!(do_step.contains("sc_core::sc_start(step_size);"));
    }
}

#[test]
fn i2c_top_signatures() {
    let plan = fixture_plan("i2c", &manifest_dir().join("target/unused"), BuildFlavor::Cmake);
    let tree = generate(&plan).unwrap();
    let top = tree.file("top.h").unwrap();
    assert!(top.contains(
        "void set_and_send(bool start, bool rw, SlaveAddress slave, sc_dt::sc_uint<8> wdata) {"
    ));
    assert!(top.contains("void retrieve_result(bool& ack, sc_dt::sc_uint<8>& rdata, BusState& state) {"));
    let mut entry = tree.entry_points.clone();
    entry.sort();
    assert!(entry.contains(&"fmi3GetUInt8".to_string()) && entry.contains(&"fmi3SetBoolean".to_string()));
}

#[test]
fn generation_is_repeatable_on_disk() {
    let dir = tempfile::tempdir().unwrap();
    let plan = fixture_plan("echo", dir.path(), BuildFlavor::ShellScript);
    let tree = generate(&plan).unwrap();
    tree.write().unwrap();
    let first: Vec<_> = tree.files.keys().map(|p| fs::read(p).unwrap()).collect();
    generate(&plan).unwrap().write().unwrap();
    let second: Vec<_> = tree.files.keys().map(|p| fs::read(p).unwrap()).collect();
    assert_eq!(first, second);
    assert_eq!(tree.files.len(), 6);
}
