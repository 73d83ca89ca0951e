//! Exercises the C ABI from Rust and, where a C compiler is available,
//! compiles and runs a small C program against the generated header and
//! the static library.

use std::ffi::CStr;
use std::os::raw::c_int;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use netexp_ffi::*;

fn workspace_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .canonicalize()
        .unwrap()
}

#[test]
fn graph_cluster_assignment_estimation_pipeline() {
    unsafe {
        let mut graph: *mut NxGraph = ptr::null_mut();
        let status = nx_graph_small_world(200, 6, 0.05, 42, &mut graph);
        assert_eq!(status, NxStatus::Ok);
        assert_eq!(nx_graph_vertex_count(graph), 200);
        assert_eq!(nx_graph_edge_count(graph), 600);
        let cc = nx_graph_clustering_coefficient(graph);
        assert!(cc > 0.0 && cc < 1.0);

        let mut clustering: *mut NxClustering = ptr::null_mut();
        assert_eq!(
            nx_clustering_epsilon_net(graph, 3, 7, &mut clustering),
            NxStatus::Ok
        );
        let n_clusters = nx_clustering_count(clustering);
        assert!(n_clusters > 1 && n_clusters < 200);
        assert!(nx_clustering_of(clustering, 0) < n_clusters);
        assert_eq!(nx_clustering_of(clustering, 999), usize::MAX);

        let mut assignment: *mut NxAssignment = ptr::null_mut();
        assert_eq!(
            nx_assignment_graph_cluster(clustering, 0.5, 11, &mut assignment),
            NxStatus::Ok
        );
        assert_eq!(nx_assignment_len(assignment), 200);
        let mut z = vec![0u8; 200];
        assert_eq!(
            nx_assignment_copy_z(assignment, z.as_mut_ptr(), 200),
            NxStatus::Ok
        );
        assert!(z.iter().all(|&b| b <= 1));
        let treated: usize = z.iter().map(|&b| b as usize).sum();
        assert!(treated > 0 && treated < 200);

        let mut y = vec![0.0f64; 200];
        assert_eq!(
            nx_simulate_final(
                graph,
                assignment,
                -1.5,
                0.75,
                0.5,
                3,
                NxLink::Probit,
                99,
                y.as_mut_ptr()
            ),
            NxStatus::Ok
        );
        assert!(y.iter().all(|&v| v == 0.0 || v == 1.0));

        let mut estimate = f64::NAN;
        let mut defined: c_int = 0;
        assert_eq!(
            nx_diff_in_means(y.as_ptr(), z.as_ptr(), 200, &mut estimate, &mut defined),
            NxStatus::Ok
        );
        assert_eq!(defined, 1);
        assert!(estimate.is_finite());

        let mut hajek_est = f64::NAN;
        let mut hajek_def: c_int = 0;
        assert_eq!(
            nx_hajek(
                graph,
                clustering,
                NxExposure::Fntr,
                0.75,
                0.5,
                y.as_ptr(),
                assignment,
                &mut hajek_est,
                &mut hajek_def
            ),
            NxStatus::Ok
        );
        if hajek_def == 1 {
            assert!(hajek_est.is_finite());
        }

        let mut pi1 = vec![0.0f64; 200];
        let mut pi0 = vec![0.0f64; 200];
        assert_eq!(
            nx_exposure_prob_cluster(
                graph,
                clustering,
                NxExposure::Fntr,
                0.75,
                0.5,
                pi1.as_mut_ptr(),
                pi0.as_mut_ptr()
            ),
            NxStatus::Ok
        );
        assert!(pi1
            .iter()
            .zip(&pi0)
            .all(|(a, b)| *a > 0.0 && *b > 0.0 && a + b <= 1.0 + 1e-12));

        let mut ate = 0.0;
        let mut se = 0.0;
        assert_eq!(
            nx_true_ate(
                graph,
                -1.5,
                0.75,
                0.5,
                3,
                NxLink::Probit,
                200,
                5,
                &mut ate,
                &mut se
            ),
            NxStatus::Ok
        );
        assert!(ate > 0.0, "expected a positive effect, got {ate}");

        nx_assignment_free(assignment);
        nx_clustering_free(clustering);
        nx_graph_free(graph);
    }
}

#[test]
fn determinism_through_the_abi() {
    unsafe {
        let make = |seed: u64| -> Vec<u8> {
            let mut graph: *mut NxGraph = ptr::null_mut();
            assert_eq!(
                nx_graph_small_world(50, 4, 0.2, seed, &mut graph),
                NxStatus::Ok
            );
            let mut assignment: *mut NxAssignment = ptr::null_mut();
            assert_eq!(
                nx_assignment_independent(50, 0.5, seed, &mut assignment),
                NxStatus::Ok
            );
            let mut z = vec![0u8; 50];
            assert_eq!(
                nx_assignment_copy_z(assignment, z.as_mut_ptr(), 50),
                NxStatus::Ok
            );
            nx_assignment_free(assignment);
            nx_graph_free(graph);
            z
        };
        assert_eq!(make(3), make(3));
        assert_ne!(make(3), make(4));
    }
}

#[test]
fn errors_set_messages_and_codes() {
    unsafe {
        let mut graph: *mut NxGraph = ptr::null_mut();
        // Odd degree is rejected.
        let status = nx_graph_small_world(10, 3, 0.1, 1, &mut graph);
        assert_eq!(status, NxStatus::InvalidSpec);
        let message = CStr::from_ptr(nx_last_error_message()).to_str().unwrap();
        assert!(message.contains("even"), "message: {message}");

        // Null handles are reported, not dereferenced.
        assert_eq!(
            nx_clustering_epsilon_net(ptr::null(), 2, 1, &mut ptr::null_mut()),
            NxStatus::NullPointer
        );

        // Undefined estimates come back as defined = 0, not an error.
        let y = [1.0f64, 2.0];
        let z = [1u8, 1];
        let mut estimate = 0.0;
        let mut defined: c_int = 1;
        assert_eq!(
            nx_diff_in_means(y.as_ptr(), z.as_ptr(), 2, &mut estimate, &mut defined),
            NxStatus::Ok
        );
        assert_eq!(defined, 0);
        assert!(estimate.is_nan());

        // Bad binary input is an argument error.
        let z_bad = [2u8, 0];
        assert_eq!(
            nx_diff_in_means(y.as_ptr(), z_bad.as_ptr(), 2, &mut estimate, &mut defined),
            NxStatus::InvalidArgument
        );
    }
}

#[test]
fn header_is_generated_with_the_public_surface() {
    let header = workspace_root().join("crates/ffi/include/netexp.h");
    let text = std::fs::read_to_string(&header).expect("header generated by build script");
    for symbol in [
        "nx_graph_small_world",
        "nx_graph_dcbm",
        "nx_clustering_epsilon_net",
        "nx_assignment_graph_cluster",
        "nx_assignment_hole_punched",
        "nx_simulate_final",
        "nx_true_ate",
        "nx_exposure_prob_cluster",
        "nx_hajek",
        "nx_horvitz_thompson",
        "nx_last_error_message",
        "typedef struct NxGraph NxGraph",
        "NX_STATUS_ZERO_EXPOSURE_PROBABILITY",
    ] {
        assert!(text.contains(symbol), "header missing {symbol}");
    }
}

/// Compiles and runs a C client against the generated header and the
/// static library. Skipped silently when no C compiler is available.
#[test]
fn c_client_compiles_and_runs() {
    let cc = ["cc", "gcc", "clang"]
        .iter()
        .find(|cc| {
            Command::new(cc)
                .arg("--version")
                .output()
                .map(|o| o.status.success())
                .unwrap_or(false)
        })
        .copied();
    let Some(cc) = cc else {
        eprintln!("no C compiler found; skipping");
        return;
    };

    let root = workspace_root();
    // Make sure the static library artifact exists (tests link the rlib,
    // not the staticlib, so build it explicitly).
    let status = Command::new(env!("CARGO"))
        .args(["build", "-p", "netexp-ffi"])
        .current_dir(&root)
        .status()
        .unwrap();
    assert!(status.success());
    let staticlib = root.join("target/debug/libnetexp_ffi.a");
    assert!(staticlib.exists(), "missing {}", staticlib.display());

    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("demo.c");
    std::fs::write(
        &src,
        r#"
#include <stdio.h>
#include "netexp.h"

int main(void) {
    NxGraph *g = NULL;
    if (nx_graph_small_world(100, 4, 0.1, 7, &g) != NX_STATUS_OK) return 1;
    NxClustering *c = NULL;
    if (nx_clustering_epsilon_net(g, 3, 1, &c) != NX_STATUS_OK) return 2;
    NxAssignment *a = NULL;
    if (nx_assignment_graph_cluster(c, 0.5, 2, &a) != NX_STATUS_OK) return 3;
    double y[100];
    if (nx_simulate_final(g, a, -1.5, 0.75, 0.5, 3, NX_LINK_PROBIT, 3, y) != NX_STATUS_OK) return 4;
    unsigned char z[100];
    if (nx_assignment_copy_z(a, z, 100) != NX_STATUS_OK) return 5;
    double estimate; int defined;
    if (nx_diff_in_means(y, z, 100, &estimate, &defined) != NX_STATUS_OK) return 6;
    printf("clusters=%zu defined=%d\n", nx_clustering_count(c), defined);
    nx_assignment_free(a);
    nx_clustering_free(c);
    nx_graph_free(g);
    return 0;
}
"#,
    )
    .unwrap();
    let exe = dir.path().join("demo");
    let output = Command::new(cc)
        .arg(&src)
        .arg("-I")
        .arg(root.join("crates/ffi/include"))
        .arg(staticlib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .output()
        .unwrap();
    assert!(
        output.status.success(),
        "compile failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    let run = Command::new(&exe).output().unwrap();
    assert!(
        run.status.success(),
        "demo exited with {:?}",
        run.status.code()
    );
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(stdout.contains("clusters="), "stdout: {stdout}");
    assert!(stdout.contains("defined=1"), "stdout: {stdout}");
}
